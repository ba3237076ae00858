"""Allow ``python -m smurf ...`` alongside the ``smurf`` console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
