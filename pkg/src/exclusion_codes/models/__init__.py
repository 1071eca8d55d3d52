"""Pydantic models for tasks, protocols, matrices and reports."""
