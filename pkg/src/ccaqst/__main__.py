import sys

from ccaqst.cli import main

sys.exit(main())
