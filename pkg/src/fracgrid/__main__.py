"""Allow ``python -m fracgrid``."""

import sys

from .cli import main

sys.exit(main())
