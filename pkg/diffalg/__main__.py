import sys

from diffalg.cli import main

sys.exit(main())
