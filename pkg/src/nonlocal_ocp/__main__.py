import sys

from nonlocal_ocp.cli import main

sys.exit(main())
