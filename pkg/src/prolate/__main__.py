import sys

from prolate.cli import main

sys.exit(main())
