"""
Real-data style workflow on a synthetic housing table
=====================================================

Choose the spline size for LSTAT by cross-validation, then fit the band.
The table is synthetic; only its column layout follows the classic
housing data set.
"""

import tempfile
from pathlib import Path

from hdgam.cli import main, read_band_csv
from hdgam.data import synthetic_housing, write_csv

work = Path(tempfile.mkdtemp())
write_csv(synthetic_housing(), work / "housing.csv")

###############################################################################
# Five-fold CV over own df 4..7 and other df 4..5.
main(["cv", "--data", str(work / "housing.csv"), "--target", "MEDV", "--component", "LSTAT",
      "--own-grid", "4,5,6,7", "--other-grid", "4,5", "--out", str(work / "cv.json")])

###############################################################################
# Fit with the published choice for LSTAT and inspect a few band rows.
main(["fit", "--data", str(work / "housing.csv"), "--target", "MEDV", "--component", "LSTAT",
      "--df-own", "7", "--df-other", "4", "--out", str(work / "lstat")])
band = read_band_csv(work / "lstat.csv")
for k in range(0, 101, 25):
    print(f"LSTAT={band['x'][k]:6.2f}  [{band['lower'][k]:7.3f}, {band['upper'][k]:7.3f}]")
