import sys

from vecdual.cli import main

sys.exit(main())
