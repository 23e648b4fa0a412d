import sys

from nanopore1d.cli import main

sys.exit(main())
