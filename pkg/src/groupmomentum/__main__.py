"""Allow ``python3 -m groupmomentum``."""

import sys

from .cli import main

sys.exit(main())
