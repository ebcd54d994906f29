import sys

from pmaps.cli import main

sys.exit(main())
