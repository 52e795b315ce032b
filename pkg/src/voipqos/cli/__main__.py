"""Allow `python3 -m voipqos.cli` alongside the console script."""

import sys

from . import entrypoint

sys.exit(entrypoint())
