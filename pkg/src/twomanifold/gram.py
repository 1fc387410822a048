"""Kernel Gram matrices and double centering.

Gram matrices are stored without the ``1/n`` factor that appears in the
covariance-operator view; that factor rescales every eigenvalue (and every
singular value of a product of Grams) uniformly and never changes
eigenvectors or subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from ._linalg import is_symmetric
from .errors import DegenerateInputError, NonFiniteInputError, ParameterError

__all__ = [
    "GramMatrix",
    "CenteredGram",
    "as_dataset",
    "rbf_gram",
    "rbf_cross",
    "linear_gram",
    "center",
    "median_bandwidth",
]


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric ``n x n`` kernel matrix tagged with the kernel that built it.

    ``kernel`` is one of ``"rbf"``, ``"linear"``, ``"le"``, ``"le_normalized"``
    (or a caller supplied tag); ``bandwidth`` is set for RBF kernels.
    """

    values: np.ndarray
    kernel: str
    bandwidth: float | None = None

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class CenteredGram:
    """Double-centered Gram matrix ``H G H``."""

    values: np.ndarray
    kernel: str

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def as_dataset(X, name: str = "X") -> np.ndarray:
    """Validate observations as a finite ``n x d`` float array (rows = points).

    A 1-d input is read as ``n`` scalar observations.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ParameterError(f"{name} must be 2-d (n x d), got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ParameterError(f"{name} must have at least one row and one column, got {X.shape}")
    bad = np.argwhere(~np.isfinite(X))
    if bad.size:
        i, j = bad[0]
        raise NonFiniteInputError(
            f"{name} has {len(bad)} non-finite entries; first at row {i}, column {j} ({X[i, j]})"
        )
    return X


def _check_bandwidth(bandwidth) -> float:
    bandwidth = float(bandwidth)
    if not np.isfinite(bandwidth) or bandwidth <= 0:
        raise ParameterError(f"bandwidth must be a positive finite number, got {bandwidth}")
    return bandwidth


def rbf_gram(X, bandwidth: float | None = None) -> GramMatrix:
    """Gaussian RBF Gram matrix ``exp(-|x_i - x_j|^2 / (2 bandwidth^2))``.

    If ``bandwidth`` is None the median pairwise distance is used.
    """
    X = as_dataset(X)
    if bandwidth is None:
        bandwidth = median_bandwidth(X)
    bandwidth = _check_bandwidth(bandwidth)
    # pdist keeps the result exactly symmetric
    sq = squareform(pdist(X, "sqeuclidean"))
    K = np.exp(-sq / (2.0 * bandwidth**2))
    np.fill_diagonal(K, 1.0)
    return GramMatrix(K, "rbf", bandwidth)


def rbf_cross(A, B, bandwidth: float) -> np.ndarray:
    """Rectangular RBF kernel matrix between the rows of ``A`` and ``B``."""
    A = as_dataset(A, "A")
    B = as_dataset(B, "B")
    if A.shape[1] != B.shape[1]:
        raise ParameterError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    bandwidth = _check_bandwidth(bandwidth)
    return np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * bandwidth**2))


def linear_gram(X) -> GramMatrix:
    """Inner-product Gram matrix ``X X^T``."""
    X = as_dataset(X)
    K = X @ X.T
    K = 0.5 * (K + K.T)
    return GramMatrix(K, "linear")


def center(G, rtol: float = 1e-10) -> CenteredGram:
    """Double-center a symmetric Gram matrix: ``H G H`` with ``H = I - 11^T/n``.

    Computed as ``G - row means - column means + grand mean`` in O(n^2); the
    result is re-symmetrized so it is exactly symmetric.
    """
    kernel = getattr(G, "kernel", "custom")
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ParameterError(f"Gram matrix must be square, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise NonFiniteInputError("Gram matrix has non-finite entries")
    if not is_symmetric(G, rtol):
        raise ParameterError(
            f"Gram matrix is not symmetric (max |G - G^T| = {np.max(np.abs(G - G.T)):.3g})"
        )
    col = G.mean(axis=0)
    row = G.mean(axis=1)
    C = G - col[None, :] - row[:, None] + G.mean()
    C = 0.5 * (C + C.T)
    return CenteredGram(C, kernel)


def median_bandwidth(X) -> float:
    """Median of the pairwise Euclidean distances between rows of ``X``."""
    X = as_dataset(X)
    if X.shape[0] < 2:
        raise DegenerateInputError("median bandwidth needs at least two points")
    d = pdist(X)
    if not np.any(d > 0):
        raise DegenerateInputError("all points are identical; bandwidth is undefined")
    med = float(np.median(d))
    if med <= 0:
        raise DegenerateInputError(
            "median pairwise distance is zero (more than half the pairs are duplicates)"
        )
    return med
