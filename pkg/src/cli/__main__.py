"""Entry point for running the cli module as a script."""

import sys

from src.cli.cli import main

if __name__ == "__main__":
    sys.exit(main())
