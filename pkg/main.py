"""Main entry point for the Makanin-Razborov diagram toolkit."""

import sys

from cli import main


if __name__ == "__main__":
    sys.exit(main())
