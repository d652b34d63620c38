"""Principal component analysis fit on training rows only.

The covariance uses the L-1 divisor and a symmetric eigendecomposition.
Eigenvector sign is fixed by convention: the entry of largest absolute
value in each component is made positive, so fits are deterministic.
Requesting more components than the sample count supports is allowed (the
trailing components have zero variance) and logged, because the clustered
training protocol fits on very small sets.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, KTooLarge

__all__ = ["PcaModel", "fit_pca", "transform"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # (M,)
    components: np.ndarray    # (k, M), rows orthonormal
    eigenvalues: np.ndarray   # (k,), non-negative, non-increasing

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def truncate(self, k: int) -> "PcaModel":
        if k > self.n_components:
            raise KTooLarge(f"cannot truncate to {k} of {self.n_components} components")
        return PcaModel(self.mean, self.components[:k], self.eigenvalues[:k])

    def to_csv(self, path: str) -> None:
        """Flat CSV: mean row, then one row per component, then eigenvalues."""
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow([repr(float(v)) for v in self.mean])
            for row in self.components:
                writer.writerow([repr(float(v)) for v in row])
            writer.writerow([repr(float(v)) for v in self.eigenvalues])

    @classmethod
    def from_csv(cls, path: str) -> "PcaModel":
        with open(path, newline="", encoding="utf-8") as handle:
            rows = [np.array([float(v) for v in row]) for row in csv.reader(handle)]
        if len(rows) < 3:
            raise DimensionMismatch(f"{path}: expected mean, components and eigenvalues")
        return cls(mean=rows[0], components=np.vstack(rows[1:-1]), eigenvalues=rows[-1])


def _fix_signs(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for i, row in enumerate(out):
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            out[i] = -row
    return out


def fit_pca(x: np.ndarray, k: int) -> PcaModel:
    """Fit the top-k principal axes of the rows of x."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch("expected a 2-D sample matrix")
    n_rows, n_cols = x.shape
    if n_rows < 2:
        raise DegenerateInput(f"need at least 2 rows to fit a covariance, got {n_rows}")
    if k < 1 or k > n_cols:
        raise KTooLarge(f"k={k} outside [1, {n_cols}]")
    if k > n_rows - 1:
        logger.warning(
            "k=%d exceeds the covariance rank bound %d; trailing components have zero variance",
            k, n_rows - 1,
        )

    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n_rows - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:k]
    values = np.clip(eigenvalues[order], 0.0, None)
    components = _fix_signs(eigenvectors[:, order].T)
    return PcaModel(mean=mean, components=components, eigenvalues=values)


def transform(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """Project rows onto the principal axes: (x - mean) @ components.T."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"expected {model.n_features} columns, got {x.shape[1]}"
        )
    return (x - model.mean) @ model.components.T
