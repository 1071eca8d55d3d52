"""Agents wrapping the core computations behind a uniform ``process`` call."""

# Note: Version is defined in the parent package (src/exclusion_codes/__init__.py)
# and should not be duplicated here.
