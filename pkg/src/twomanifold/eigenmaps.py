"""Nearest-neighbour graphs, graph Laplacians and Laplacian Eigenmaps.

Besides the usual embedding, :func:`le_gram` exposes Laplacian Eigenmaps as
a kernel method: the pseudoinverse ``L^+`` is a Gram matrix whose top
eigenvectors are the LE coordinates, so it can be plugged into any
Gram-based routine (kernel PCA, kernel SVD).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from ._linalg import fix_signs, is_symmetric
from .errors import DegenerateInputError, ParameterError
from .gram import GramMatrix, as_dataset, median_bandwidth

__all__ = [
    "NeighborGraph",
    "LaplacianMatrix",
    "knn_graph",
    "graph_laplacian",
    "check_connected",
    "le_gram",
    "le_embedding",
    "PINV_RTOL",
]

#: eigenvalues below ``PINV_RTOL * lambda_max`` count as zero in ``le_gram``
PINV_RTOL = 1e-9


@dataclass(frozen=True)
class NeighborGraph:
    weights: np.ndarray
    k_nn: int
    mode: str = "binary"
    bandwidth: float | None = None

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class LaplacianMatrix:
    """Graph Laplacian ``S - W`` or its normalized form ``I - S^-1/2 W S^-1/2``."""

    L: np.ndarray
    normalized: bool
    degrees: np.ndarray
    weights: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.L if dtype is None else self.L.astype(dtype)

    @property
    def n(self) -> int:
        return self.L.shape[0]


def knn_graph(X, k_nn: int, mode: str = "binary", bandwidth: float | None = None) -> NeighborGraph:
    """Symmetric k-nearest-neighbour adjacency matrix.

    Edge ``(i, j)`` is present if ``j`` is among the ``k_nn`` nearest
    neighbours of ``i`` or vice versa. Ties at equal distance go to the
    lower index; duplicated points are legal neighbours at distance 0.

    Parameters
    ----------
    X : array-like, shape (n, d)
    k_nn : int
        Neighbours per point, ``1 <= k_nn < n``.
    mode : {"binary", "rbf"}
        Edge weights of 1, or the Gaussian RBF value of the edge length.
    bandwidth : float, optional
        RBF bandwidth; defaults to the median pairwise distance.
    """
    X = as_dataset(X)
    n = X.shape[0]
    k_nn = int(k_nn)
    if not 1 <= k_nn < n:
        raise ParameterError(f"k_nn must satisfy 1 <= k_nn < n = {n}, got {k_nn}")
    if mode not in ("binary", "rbf"):
        raise ParameterError(f"unknown graph mode {mode!r}; expected 'binary' or 'rbf'")

    D = squareform(pdist(X))
    np.fill_diagonal(D, np.inf)
    # stable sort: equal distances keep index order
    nbrs = np.argsort(D, axis=1, kind="stable")[:, :k_nn]
    A = np.zeros((n, n), dtype=bool)
    A[np.repeat(np.arange(n), k_nn), nbrs.ravel()] = True
    A |= A.T

    if mode == "binary":
        return NeighborGraph(A.astype(float), k_nn, "binary")
    if bandwidth is None:
        bandwidth = median_bandwidth(X)
    bandwidth = float(bandwidth)
    if bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    np.fill_diagonal(D, 0.0)
    W = np.where(A, np.exp(-(D**2) / (2.0 * bandwidth**2)), 0.0)
    return NeighborGraph(W, k_nn, "rbf", bandwidth)


def graph_laplacian(W, normalized: bool = False) -> LaplacianMatrix:
    """Unnormalized ``S - W`` or normalized ``I - S^-1/2 W S^-1/2`` Laplacian."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ParameterError(f"weight matrix must be square, got {W.shape}")
    if not is_symmetric(W) or np.any(W < 0):
        raise ParameterError("weight matrix must be symmetric and nonnegative")
    if np.any(np.diag(W) != 0):
        raise ParameterError("weight matrix must have a zero diagonal")
    S = W.sum(axis=1)
    if not normalized:
        L = np.diag(S) - W
        return LaplacianMatrix(L, False, S, W)
    isolated = np.flatnonzero(S <= 0)
    if isolated.size:
        raise DegenerateInputError(
            f"normalized Laplacian undefined: vertex {isolated[0]} has degree 0"
            + (f" ({isolated.size} isolated vertices)" if isolated.size > 1 else "")
        )
    d = 1.0 / np.sqrt(S)
    L = np.eye(len(S)) - d[:, None] * W * d[None, :]
    L = 0.5 * (L + L.T)
    return LaplacianMatrix(L, True, S, W)


def check_connected(lap: LaplacianMatrix) -> None:
    """Raise :class:`DegenerateInputError` listing component sizes if disconnected."""
    n_comp, labels = connected_components(lap.weights != 0, directed=False)
    if n_comp > 1:
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        raise DegenerateInputError(
            f"neighbour graph is disconnected: {n_comp} components of sizes {sizes}"
        )


def _laplacian_eig(lap: LaplacianMatrix):
    check_connected(lap)
    w, V = np.linalg.eigh(lap.L)  # ascending
    return w, V


def le_gram(lap: LaplacianMatrix, rtol: float = PINV_RTOL) -> GramMatrix:
    """Laplacian Eigenmaps Gram matrix, the pseudoinverse ``L^+``.

    Eigenvalues below ``rtol * lambda_max`` are treated as zero.
    """
    w, V = _laplacian_eig(lap)
    keep = w > rtol * w[-1]
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    G = (V * inv) @ V.T
    G = 0.5 * (G + G.T)
    return GramMatrix(G, "le_normalized" if lap.normalized else "le")


def le_embedding(lap: LaplacianMatrix, k: int, scaled: bool = False) -> np.ndarray:
    """Laplacian Eigenmaps coordinates, shape ``(n, k)``.

    Columns are the eigenvectors of ``L`` for the 2nd through ``(k+1)``-th
    smallest eigenvalues; with ``scaled=True`` column ``j`` is multiplied by
    ``lambda_j ** -0.5``.
    """
    n = lap.n
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 1 <= k <= n - 1 = {n - 1}, got {k}")
    w, V = _laplacian_eig(lap)
    E = fix_signs(V[:, 1 : k + 1])
    if scaled:
        E = E / np.sqrt(w[1 : k + 1])
    return E
