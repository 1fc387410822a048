"""Recovery metrics: Procrustes alignment, principal angles, kNN overlap."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ._linalg import orthonormal_basis
from .errors import DegenerateInputError, ParameterError
from .gram import as_dataset

__all__ = [
    "AlignmentReport",
    "procrustes_align",
    "procrustes_error",
    "principal_angles",
    "neighborhood_preservation",
    "alignment_report",
]


@dataclass(frozen=True)
class AlignmentReport:
    procrustes_error: float
    rotation: np.ndarray
    scale: float
    translation: np.ndarray
    neighborhood_overlap: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rotation"] = self.rotation.tolist()
        d["translation"] = self.translation.tolist()
        return d


def procrustes_align(E, Z) -> AlignmentReport:
    """Best similarity transform ``Z ~ s * E @ R + t`` (reflections allowed).

    The reported error is ``|Z - (s E R + t)|_F / |Z - mean(Z)|_F``, so 0 is
    a perfect match and 1 is no better than predicting the mean.
    """
    E = as_dataset(E, "E")
    Z = as_dataset(Z, "Z")
    if E.shape != Z.shape:
        raise ParameterError(f"shape mismatch: E {E.shape} vs Z {Z.shape}")
    n, k = Z.shape
    if n < k:
        raise ParameterError(f"need n >= k, got n={n}, k={k}")
    mu_e, mu_z = E.mean(axis=0), Z.mean(axis=0)
    Ec, Zc = E - mu_e, Z - mu_z
    z_norm = np.linalg.norm(Zc)
    if z_norm == 0:
        raise DegenerateInputError("target has zero variance; Procrustes error undefined")
    e_sq = np.sum(Ec**2)
    if e_sq == 0:
        R = np.eye(k)
        return AlignmentReport(1.0, R, 0.0, mu_z)
    U, S, Vt = np.linalg.svd(Ec.T @ Zc)
    R = U @ Vt
    scale = S.sum() / e_sq
    fit = scale * Ec @ R
    err = np.linalg.norm(Zc - fit) / z_norm
    translation = mu_z - scale * mu_e @ R
    return AlignmentReport(float(err), R, float(scale), translation)


def procrustes_error(E, Z) -> float:
    return procrustes_align(E, Z).procrustes_error


def principal_angles(A, B) -> np.ndarray:
    """Principal angles (ascending, radians) between ``range(A)`` and ``range(B)``.

    Cosines come from the singular values of ``Qa^T Qb``; small angles are
    taken from the sines instead, which keeps them accurate near zero.
    """
    Qa = orthonormal_basis(A, "A")
    Qb = orthonormal_basis(B, "B")
    if Qa.shape[0] != Qb.shape[0]:
        raise ParameterError(f"ambient dimension mismatch: {Qa.shape[0]} vs {Qb.shape[0]}")
    if Qa.shape[1] < Qb.shape[1]:
        Qa, Qb = Qb, Qa
    cos = np.clip(np.linalg.svd(Qa.T @ Qb, compute_uv=False), 0.0, 1.0)
    cos = np.sort(cos)[::-1]
    sin = np.linalg.svd(Qb - Qa @ (Qa.T @ Qb), compute_uv=False)
    sin = np.sort(np.clip(sin, 0.0, 1.0))
    angles = np.where(cos**2 < 0.5, np.arccos(cos), np.arcsin(sin))
    return np.sort(angles)


def _knn_sets(P, k_nn):
    D = squareform(pdist(P))
    np.fill_diagonal(D, np.inf)
    return np.argsort(D, axis=1, kind="stable")[:, :k_nn]


def neighborhood_preservation(E, Z, k_nn: int = 10) -> float:
    """Mean fraction of each point's ``k_nn`` neighbours in ``Z`` kept in ``E``."""
    E = as_dataset(E, "E")
    Z = as_dataset(Z, "Z")
    n = E.shape[0]
    if Z.shape[0] != n:
        raise ParameterError(f"row count mismatch: {n} vs {Z.shape[0]}")
    if not 1 <= k_nn < n:
        raise ParameterError(f"k_nn must satisfy 1 <= k_nn < n = {n}, got {k_nn}")
    ne, nz = _knn_sets(E, k_nn), _knn_sets(Z, k_nn)
    hits = sum(len(np.intersect1d(a, b, assume_unique=True)) for a, b in zip(ne, nz))
    return hits / (n * k_nn)


def alignment_report(E, Z, k_nn: int | None = 10) -> AlignmentReport:
    rep = procrustes_align(E, Z)
    if k_nn is None:
        return rep
    overlap = neighborhood_preservation(E, Z, k_nn)
    return AlignmentReport(rep.procrustes_error, rep.rotation, rep.scale, rep.translation, overlap)
