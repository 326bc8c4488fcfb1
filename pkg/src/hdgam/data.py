"""CSV ingestion and the synthetic housing-style fixture."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .errors import DataError

MIN_ROWS = 10

# column name -> (lower, upper) range of the synthetic covariate
FIXTURE_COLUMNS = {
    "LSTAT": (1.7, 38.0),
    "CRIM": (0.006, 89.0),
    "NOX": (0.385, 0.871),
    "TAX": (187.0, 711.0),
    "AGE": (2.9, 100.0),
    "DIST": (1.13, 12.1),
    "RM": (3.56, 8.78),
    "INDUS": (0.46, 27.7),
    "ZN": (0.0, 100.0),
    "BLACK": (0.32, 396.9),
    "PTRATIO": (12.6, 22.0),
}
FIXTURE_TARGET = "MEDV"


@dataclass
class DataTable:
    columns: list[str]
    values: np.ndarray
    source: str = ""

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise DataError(f"column {name!r} not found; available: {', '.join(self.columns)}", column=name) from None

    def split(self, target: str, component: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
        """(y, x_component, x_others, other_names) with the target excluded from the covariates."""
        if component == target:
            raise DataError("component and target must be different columns", column=component)
        y = self.column(target)
        x1 = self.column(component)
        others = [c for c in self.columns if c not in (target, component)]
        if not others:
            raise DataError("need at least one covariate besides the component")
        xo = self.values[:, [self.index(c) for c in others]]
        return y, x1, xo, others


def load_csv(path, target: str) -> DataTable:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row missing") from None
        header = [h.strip() for h in header]
        if not header or any(not h for h in header):
            raise DataError(f"{path}: header has empty column names")
        seen = set()
        for h in header:
            if h in seen:
                raise DataError(f"{path}: duplicate column name {h!r}", column=h)
            seen.add(h)
        try:
            float(header[0])
        except ValueError:
            pass
        else:
            raise DataError(f"{path}: first row looks numeric; a header row is required")
        if target not in header:
            raise DataError(f"{path}: target column {target!r} not in header", column=target)
        rows = []
        for i, raw in enumerate(reader, start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise DataError(f"{path}: row {i} has {len(raw)} fields, expected {len(header)}", row=i)
            vals = []
            for name, cell in zip(header, raw):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"{path}: non-numeric value {cell!r} at row {i}, column {name!r}", row=i, column=name) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: non-finite value {cell!r} at row {i}, column {name!r}", row=i, column=name)
                vals.append(v)
            rows.append(vals)
    if len(rows) < MIN_ROWS:
        raise DataError(f"{path}: {len(rows)} data rows, need at least {MIN_ROWS}")
    return DataTable(columns=header, values=np.array(rows, dtype=float), source=str(path))


def synthetic_housing(n: int = 506, seed: int = 1978) -> DataTable:
    """Housing-style table with the usual column names and made-up values.

    Covariates are correlated (Gaussian copula) and mapped onto realistic
    ranges; the response is additive with nonlinear LSTAT and RM effects.
    """
    rng = np.random.default_rng(seed)
    names = list(FIXTURE_COLUMNS)
    p = len(names)
    idx = np.arange(p)
    corr = 0.3 ** np.abs(idx[:, None] - idx[None, :])
    latent = rng.standard_normal((n, p)) @ np.linalg.cholesky(corr).T
    u = ndtr(latent)
    X = np.empty((n, p))
    for k, name in enumerate(names):
        lo, hi = FIXTURE_COLUMNS[name]
        X[:, k] = lo + (hi - lo) * u[:, k]
    col = {name: X[:, k] for k, name in enumerate(names)}
    lstat = (col["LSTAT"] - 1.7) / 36.3
    rm = (col["RM"] - 3.56) / 5.22
    medv = (
        22.0
        + 12.0 * np.exp(-4.0 * lstat) - 4.0
        + 25.0 * np.maximum(rm - 0.6, 0.0) ** 2 * 4
        + 3.0 * rm
        - 2.0 * (col["NOX"] - 0.6) / 0.25
        - 1.5 * (col["PTRATIO"] - 17.0) / 3.0
        + 0.5 * np.sin(col["DIST"])
    )
    medv = medv + rng.normal(0, 1.0 + 1.5 * lstat, n)
    values = np.column_stack([medv, X])
    return DataTable(columns=[FIXTURE_TARGET] + names, values=values, source=f"synthetic(seed={seed})")


def write_csv(table: DataTable, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(table.columns)
        for row in table.values:
            w.writerow([repr(float(v)) for v in row])
