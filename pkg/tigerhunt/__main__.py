import sys

from tigerhunt.cli import main

sys.exit(main())
