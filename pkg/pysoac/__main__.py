"""
Main entry point for running pysoac as a module.
Usage: python -m pysoac solve model.mps
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
