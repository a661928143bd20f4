import sys

from wxds.harness.cli import main

sys.exit(main())
