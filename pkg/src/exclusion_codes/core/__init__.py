"""Computational core: states, tasks, classical search, optimization, matrices."""
