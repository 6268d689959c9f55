"""
Entry point for running boltzsynth as a module.

This allows the tool to be run with 'python -m boltzsynth'.
"""

import sys

from .main import main

if __name__ == "__main__":
    sys.exit(main())
