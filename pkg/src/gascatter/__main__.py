"""Allow ``python -m gascatter``."""

import sys

from gascatter.app import main

sys.exit(main())
