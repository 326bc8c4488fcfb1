"""Write the synthetic housing-style CSV (506 rows, MEDV plus 11 covariates)."""

import sys

from hdgam.cli import main

if __name__ == "__main__":
    sys.exit(main(["make-fixture", *sys.argv[1:]]))
