"""Hover endurance of multirotors with staged energy storage."""

from ._staged_endurance import *  # noqa: F401,F403
from ._staged_endurance import run_cli


def main() -> int:
    import sys

    code, out, err = run_cli(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
