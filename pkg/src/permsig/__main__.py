"""Entry point for ``python -m permsig``."""

from __future__ import annotations

import sys

from permsig.cli import main

if __name__ == "__main__":
    sys.exit(main())
