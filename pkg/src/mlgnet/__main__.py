import sys

from mlgnet.cli import main

sys.exit(main())
