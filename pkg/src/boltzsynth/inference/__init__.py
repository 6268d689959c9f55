"""Exact marginals, layer conditionals and ancestral sampling."""
