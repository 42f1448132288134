import sys

from eyefresh.cli import main

sys.exit(main())
