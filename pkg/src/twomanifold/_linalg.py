"""Small dense linear-algebra helpers shared across modules."""

import numpy as np


def fix_signs(vectors, partner=None):
    """Flip columns so the largest-magnitude entry of each is positive.

    Ties on magnitude go to the lowest row index. When ``partner`` is given
    (e.g. the right singular vectors paired with ``vectors``), the same flips
    are applied to it so products like ``U S V^T`` are preserved.
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors if partner is None else (vectors, np.array(partner, dtype=float))
    mags = np.abs(vectors)
    # entries within rounding of the column maximum count as ties
    near_max = mags >= mags.max(axis=0) * (1 - 1e-10)
    pivots = np.argmax(near_max, axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs
    if partner is None:
        return vectors
    partner = np.array(partner, dtype=float, copy=True) * signs
    return vectors, partner


def symmetric_eig_desc(a):
    """Eigen-decomposition of a symmetric matrix, eigenvalues descending."""
    w, v = np.linalg.eigh(a)
    return w[::-1], v[:, ::-1]


def is_symmetric(a, rtol=1e-12):
    scale = max(np.max(np.abs(a)), np.finfo(float).tiny) if a.size else 1.0
    return np.max(np.abs(a - a.T), initial=0.0) <= rtol * scale


def orthonormal_basis(a, name="basis"):
    """Orthonormal basis of the column space of ``a``; raise if rank deficient."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    scale = np.linalg.norm(a, 2) if a.size else 0.0
    if a.shape[1] > a.shape[0] or np.any(diag <= 1e-12 * max(scale, 1e-300)):
        raise ValueError(f"{name} is rank deficient: columns are not linearly independent")
    return q
