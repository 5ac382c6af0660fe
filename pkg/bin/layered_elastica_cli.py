#!/usr/bin/env python3
import sys

from layered_elastica.cli import main


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
