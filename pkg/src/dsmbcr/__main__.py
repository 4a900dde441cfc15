import sys

from dsmbcr.cli import main

sys.exit(main())
