"""Shared helpers: console logging, serialization and worker pools."""
