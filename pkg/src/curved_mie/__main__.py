import sys

from curved_mie.cli import main

sys.exit(main())
