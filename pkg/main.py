"""Run the hsvp command line from a source checkout."""

import sys

from hsvp.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
