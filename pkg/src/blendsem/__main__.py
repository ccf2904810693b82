import sys

from blendsem.cli import main

sys.exit(main())
