"""Domain types, distribution arithmetic and file formats."""
