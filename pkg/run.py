#!/usr/bin/env python3
"""
Starter-Script für cyclewalk
"""
import sys

from cyclewalk.cli import main

if __name__ == "__main__":
    sys.exit(main())
