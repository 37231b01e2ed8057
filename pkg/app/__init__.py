"""Application layer for heptainv.

Contains the command-line components:
- cli: argument parsing, subcommand dispatch and exit codes
- sweep: ordered worker pool for sweeps and verification cases
"""

from app.cli import CommandConfig, build_parser, main, run
from app.sweep import resolve_workers, run_ordered

__all__ = [
    "CommandConfig",
    "build_parser",
    "main",
    "resolve_workers",
    "run",
    "run_ordered",
]
