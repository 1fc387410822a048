"""Kernel PCA, kernel SVD of cross-covariance operators, and instrumental eigenmaps.

All routines work on the Gram side. For feature matrices ``Phi`` (columns
``phi(x_i)``) and ``Ups`` (columns ``ups(y_i)``), the centered Grams are
``C_X = H Phi^T Phi H`` and ``C_Y = H Ups^T Ups H``, and the nonzero singular
values of the empirical cross-covariance ``Phi H Ups^T`` relate to those of
``C_X C_Y`` by squaring. Feature maps and covariance operators are never
materialized.

Orientation: :func:`kernel_svd` factors ``C_X C_Y = U diag(s) V^T``.
The eigenvectors of ``C_Y C_X`` (the Gram-side route to the left singular
vectors of the cross-covariance) are the columns of ``V`` here, because
``C_Y C_X = (C_X C_Y)^T``; ``U`` holds the eigenvectors of ``C_X C_Y``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._linalg import fix_signs, symmetric_eig_desc
from .errors import ParameterError
from .gram import as_dataset

__all__ = [
    "RankWarning",
    "Spectrum",
    "TruncatedSVD",
    "EmbeddingPair",
    "kernel_pca",
    "kernel_svd",
    "instrumental_eigenmaps",
    "two_subspace_pca",
    "pca",
]


class RankWarning(UserWarning):
    """Fewer components than requested were numerically available."""


@dataclass(frozen=True)
class Spectrum:
    """Top eigenpairs of a centered Gram matrix and the induced embedding.

    ``embedding[:, i] = eigenvectors[:, i] * sqrt(eigenvalues[i])`` so that
    ``embedding @ embedding.T`` is the best rank-k approximation of ``C``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    embedding: np.ndarray
    requested_k: int

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class TruncatedSVD:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    requested_k: int

    @property
    def k(self) -> int:
        return len(self.singular_values)

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.T


@dataclass(frozen=True)
class EmbeddingPair:
    """Embeddings of the two views; ``svd`` is the factorization they came from."""

    E_X: np.ndarray
    E_Y: np.ndarray
    svd: TruncatedSVD


def _check_k(k, upper, what="k"):
    k = int(k)
    if k < 1:
        raise ParameterError(f"{what} must be >= 1, got {k}")
    if k > upper:
        raise ParameterError(f"{what} must be <= {upper}, got {k}")
    return k


def _square(C, name):
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ParameterError(f"{name} must be a square matrix, got shape {C.shape}")
    return C


def _warn_truncated(requested, available, what):
    warnings.warn(
        f"requested {requested} {what} but only {available} are numerically nonzero; "
        f"returning {available}",
        RankWarning,
        stacklevel=3,
    )


def kernel_pca(C, k: int, rtol: float = 1e-10) -> Spectrum:
    """Top-``k`` eigenpairs of a centered Gram matrix.

    Eigenvalues at or below ``rtol * lambda_max`` are dropped; if that leaves
    fewer than ``k`` a :class:`RankWarning` is issued and the shorter
    spectrum is returned.
    """
    C = _square(C, "C")
    n = C.shape[0]
    k = _check_k(k, n)
    w, V = symmetric_eig_desc(C)
    top = w[0] if n else 0.0
    rank = int(np.sum(w > rtol * top)) if top > 0 else 0
    m = min(k, rank)
    if m < k:
        _warn_truncated(k, m, "eigenpairs")
    w, V = w[:m], fix_signs(V[:, :m])
    return Spectrum(w, V, V * np.sqrt(w), k)


def kernel_svd(C_X, C_Y, k: int, rtol: float | None = None) -> TruncatedSVD:
    """Rank-``k`` SVD of the product ``C_X @ C_Y`` of two centered Grams.

    The product is formed explicitly (O(n^3)). For badly conditioned inputs
    one could instead factor ``C_X^{1/2} C_Y^{1/2}``-style symmetrized
    products; that route is not implemented.

    Singular values below ``rtol * s_max`` (default ``n * eps``) count as
    zero; asking for more than the numerical rank warns and truncates.
    The sign of each pair ``(u_i, v_i)`` is fixed jointly from ``u_i``.
    """
    C_X = _square(C_X, "C_X")
    C_Y = _square(C_Y, "C_Y")
    if C_X.shape != C_Y.shape:
        raise ParameterError(f"Gram size mismatch: {C_X.shape} vs {C_Y.shape}")
    n = C_X.shape[0]
    k = _check_k(k, n)
    if rtol is None:
        rtol = n * np.finfo(float).eps
    U, s, Vt = np.linalg.svd(C_X @ C_Y)
    rank = int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0
    m = min(k, rank)
    if m < k:
        _warn_truncated(k, m, "singular triplets")
    U, V = fix_signs(U[:, :m], Vt[:m].T)
    return TruncatedSVD(U, s[:m], V, k)


def instrumental_eigenmaps(C_X, C_Y, k: int) -> EmbeddingPair:
    """Two-view embeddings from the kernel SVD of ``C_X C_Y``.

    ``E_X = U diag(s)^{1/2}`` and ``E_Y = V diag(s)^{1/2}``, hence
    ``E_X @ E_Y.T`` is the rank-k truncation of ``C_X @ C_Y``. Pass Grams
    built by any one-view method (LE pseudoinverse, RBF, ...), centered.
    """
    svd = kernel_svd(C_X, C_Y, k)
    root = np.sqrt(svd.singular_values)
    return EmbeddingPair(svd.U * root, svd.V * root, svd)


def two_subspace_pca(X, Y, k: int) -> EmbeddingPair:
    """Linear two-view PCA through the SVD of the centered cross-covariance.

    Parameters
    ----------
    X : array-like, shape (n, d_X)
    Y : array-like, shape (n, d_Y)
        Paired observations; each view acts as an instrument for the other.
    k : int
        Number of directions. Values above ``min(d_X, d_Y)`` or the numerical
        rank of the cross-covariance are truncated with a :class:`RankWarning`.

    Returns
    -------
    EmbeddingPair
        ``svd.U`` (d_X x k) and ``svd.V`` (d_Y x k) are the leading singular
        vectors of ``(1/n) (X - mean)^T (Y - mean)``; ``E_X`` and ``E_Y`` hold
        the projections of the centered points onto them.
    """
    X = as_dataset(X, "X")
    Y = as_dataset(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ParameterError(f"views must have the same number of rows: {X.shape[0]} vs {Y.shape[0]}")
    n = X.shape[0]
    k = int(k)
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    Xc = X - X.mean(axis=0)
    Yc = Y - Y.mean(axis=0)
    cov = Xc.T @ Yc / n
    U, s, Vt = np.linalg.svd(cov, full_matrices=False)
    tol = max(cov.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol)) if s.size and s[0] > 0 else 0
    m = min(k, rank)
    if m < k:
        _warn_truncated(k, m, "directions")
    U, V = fix_signs(U[:, :m], Vt[:m].T)
    svd = TruncatedSVD(U, s[:m], V, k)
    return EmbeddingPair(Xc @ U, Yc @ V, svd)


def pca(X, k: int) -> np.ndarray:
    """Top-``k`` principal directions (``d x k``) of one centered view."""
    X = as_dataset(X)
    k = _check_k(k, X.shape[1])
    Xc = X - X.mean(axis=0)
    _, V = symmetric_eig_desc(Xc.T @ Xc / X.shape[0])
    return fix_signs(V[:, :k])
