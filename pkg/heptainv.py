#!/usr/bin/env python3
"""
heptainv - explicit inverses, norm bounds and O(n) solvers for
seven-diagonal Toeplitz and near-Toeplitz matrices.
"""
import sys
from typing import Optional, Sequence

from app.cli import main as cli_main


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the command line."""
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
