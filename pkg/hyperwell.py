#!/usr/bin/env python3
"""
Hyperwell - bound states of the hyperbolic double-well potential
Entry point for the application
"""

import sys

from hyperwell.cli import main

if __name__ == "__main__":
    sys.exit(main())
