import sys

from botlc.cli import main

sys.exit(main())
