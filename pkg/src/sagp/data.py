"""CSV datasets: header row, one response column, numeric predictors."""

import csv
import math
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Malformed input file."""


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    names: list
    response: str
    y_center: float = 0.0
    y_scale: float = 1.0

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @classmethod
    def from_arrays(cls, X, y, names=None, response="y"):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        if names is None:
            names = [f"x{j + 1}" for j in range(X.shape[1])]
        ds = cls(X=X, y=y, names=list(names), response=response)
        ds.standardize()
        return ds

    def standardize(self):
        """Record centring/scaling of the response; X is used as given."""
        self.y_center = float(np.mean(self.y)) if self.y.size else 0.0
        sd = float(np.std(self.y)) if self.y.size else 0.0
        self.y_scale = sd if sd > 0 else 1.0

    @property
    def y_scaled(self):
        return (self.y - self.y_center) / self.y_scale

    def subset(self, rows):
        out = Dataset(X=self.X[rows], y=self.y[rows], names=self.names, response=self.response)
        out.standardize()
        return out


def _parse_float(text, row, col):
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"row {row}, column {col!r}: non-numeric value {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"row {row}, column {col!r}: non-finite value {text!r}")
    return v


def read_table(path):
    """Header plus a float matrix; raises `DataError` naming the bad cell."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = []
        for i, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(f"row {i}: expected {len(header)} fields, found {len(rec)}")
            rows.append([_parse_float(c.strip(), i, header[j]) for j, c in enumerate(rec)])
    M = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, M


def read_dataset(path, response="y"):
    header, M = read_table(path)
    if response not in header:
        raise DataError(f"response column {response!r} not in header {header}")
    j = header.index(response)
    names = [h for i, h in enumerate(header) if i != j]
    X = np.delete(M, j, axis=1)
    ds = Dataset(X=X, y=M[:, j], names=names, response=response)
    ds.standardize()
    return ds


def read_predictors(path, names):
    """Predictor-only table; a response column, if present, is ignored."""
    header, M = read_table(path)
    missing = [c for c in names if c not in header]
    extra = [c for c in header if c not in names]
    if missing or len(extra) > 1:
        raise DataError(f"expected predictor columns {names}, found {header}")
    return M[:, [header.index(c) for c in names]]


def write_dataset(path, X, y, names=None, response="y"):
    X = np.atleast_2d(X)
    names = names or [f"x{j + 1}" for j in range(X.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + [response])
        for row, v in zip(X, y):
            w.writerow([repr(float(a)) for a in row] + [repr(float(v))])
