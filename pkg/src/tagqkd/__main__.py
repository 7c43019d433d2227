import sys

from tagqkd.cli import main

sys.exit(main())
