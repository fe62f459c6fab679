#!/usr/bin/env python3
"""Reproduce the built-in example table: minimum H-eigenvalues vs truth.

Equivalent to `sostensor repro --suite examples`; kept as a script so the
table can be regenerated with one command during experiments.
"""

import sys

from sostensor.cli import main

if __name__ == "__main__":
    sys.exit(main(["repro", "--suite", "examples"] + sys.argv[1:]))
