import sys

from aperiodica.cli import main

sys.exit(main())
