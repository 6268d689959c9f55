"""Configuration and error handling services."""
