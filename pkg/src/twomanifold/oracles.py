"""Slow reference implementations used to cross-check the fast paths.

Each oracle computes its quantity straight from the definition (explicit
loops, explicit centering matrices, exhaustive searches, alternative LAPACK
routes) and shares no code with the production routines it checks.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import scipy.linalg

from .io import write_csv, write_json


def rbf_gram_oracle(X, bandwidth):
    n = len(X)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            sq = sum((float(a) - float(b)) ** 2 for a, b in zip(X[i], X[j]))
            K[i, j] = math.exp(-sq / (2.0 * bandwidth * bandwidth))
    return K


def linear_gram_oracle(X):
    n = len(X)
    return np.array([[math.fsum(float(a) * float(b) for a, b in zip(X[i], X[j])) for j in range(n)] for i in range(n)])


def centering_matrix(n):
    return np.eye(n) - np.ones((n, n)) / n


def center_oracle(G):
    H = centering_matrix(len(G))
    return H @ G @ H


def median_distance_oracle(X):
    d = sorted(
        math.dist(X[i], X[j]) for i in range(len(X)) for j in range(i + 1, len(X))
    )
    m = len(d)
    return d[m // 2] if m % 2 else 0.5 * (d[m // 2 - 1] + d[m // 2])


def knn_graph_oracle(X, k_nn):
    n = len(X)
    W = np.zeros((n, n))
    for i in range(n):
        ranked = sorted((math.dist(X[i], X[j]), j) for j in range(n) if j != i)
        for _, j in ranked[:k_nn]:
            W[i, j] = W[j, i] = 1.0
    return W


def laplacian_oracle(W, normalized=False):
    n = len(W)
    L = np.zeros((n, n))
    deg = [math.fsum(W[i]) for i in range(n)]
    for i in range(n):
        for j in range(n):
            if normalized:
                L[i, j] = (1.0 if i == j else 0.0) - W[i, j] / math.sqrt(deg[i] * deg[j])
            else:
                L[i, j] = (deg[i] if i == j else 0.0) - W[i, j]
    return L


def pinv_oracle(L):
    return scipy.linalg.pinv(L, atol=0.0, rtol=1e-9)


def product_svd_oracle(C_X, C_Y):
    """Singular values / vectors of ``C_X C_Y`` via the QR-iteration SVD (gesvd)."""
    P = np.einsum("ij,jk->ik", C_X, C_Y)
    return scipy.linalg.svd(P, lapack_driver="gesvd")


def jordan_wielandt_singular_values(P):
    """Singular values of ``P`` as the nonnegative eigenvalues of ``[[0, P], [P^T, 0]]``."""
    n, m = P.shape
    J = np.zeros((n + m, n + m))
    J[:n, n:] = P
    J[n:, :n] = P.T
    w = scipy.linalg.eigvalsh(J)
    return np.sort(w)[::-1][: min(n, m)]


def procrustes_oracle(E, Z, grid=3600):
    """Similarity Procrustes error for 2-d point sets by search over the rotation angle."""
    Ec, Zc = E - E.mean(0), Z - Z.mean(0)
    zz = float(np.sum(Zc**2))
    ee = float(np.sum(Ec**2))

    def residual(theta, reflect):
        c, s = math.cos(theta), math.sin(theta)
        R = np.array([[c, -s], [s, c]])
        if reflect:
            R = R @ np.diag([1.0, -1.0])
        ER = Ec @ R
        scale = max(float(np.sum(ER * Zc)) / ee, 0.0)
        return float(np.sum((Zc - scale * ER) ** 2))

    best = math.inf
    for reflect in (False, True):
        thetas = np.linspace(0, 2 * math.pi, grid, endpoint=False)
        vals = [residual(t, reflect) for t in thetas]
        i = int(np.argmin(vals))
        lo, hi = thetas[i] - 2 * math.pi / grid, thetas[i] + 2 * math.pi / grid
        for _ in range(100):  # golden-section refinement
            a = hi - (hi - lo) / 1.618033988749895
            b = lo + (hi - lo) / 1.618033988749895
            if residual(a, reflect) < residual(b, reflect):
                hi = b
            else:
                lo = a
        best = min(best, residual(0.5 * (lo + hi), reflect))
    return math.sqrt(max(best, 0.0) / zz)


def principal_angles_oracle_2d(A, B, grid=20000):
    """Principal angles between two 2-d subspaces by sweeping unit vectors of ``range(A)``.

    For unit ``u`` in ``range(A)`` the best cosine against ``range(B)`` is
    ``|Qb^T u|``; its minimum and maximum over the circle are the cosines of
    the largest and smallest principal angles.
    """
    Qa = scipy.linalg.orth(A)
    Qb = scipy.linalg.orth(B)
    t = np.linspace(0, math.pi, grid, endpoint=False)
    U = Qa @ np.vstack([np.cos(t), np.sin(t)])
    cos = np.clip(np.linalg.norm(Qb.T @ U, axis=0), 0, 1)
    return np.array([math.acos(cos.max()), math.acos(cos.min())])


def _random_centered_pair(rng, n):
    def one():
        F = rng.standard_normal((n, rng.integers(4, n)))
        G = F @ F.T
        return center_oracle(0.5 * (G + G.T))

    return one(), one()


def write_golden(out, cases: int, n: int, seed: int) -> dict:
    """Run production code against the oracles on random inputs and save golden files.

    Raises ``ValueError`` if any comparison exceeds its tolerance.
    """
    from . import eigenmaps, evaluation, gram, spectral

    out = Path(out)
    rng = np.random.default_rng(seed)
    checks = []

    def record(name, case, dev, tol):
        checks.append({"check": name, "case": case, "max_deviation": float(dev), "tolerance": tol,
                       "passed": bool(dev <= tol)})

    for c in range(cases):
        d = out / f"case_{c:03d}"
        X = rng.standard_normal((n, 3))
        bw = float(rng.uniform(0.5, 2.0))
        K = rbf_gram_oracle(X, bw)
        write_csv(d / "X.csv", X)
        write_csv(d / "rbf_gram.csv", K)
        record("rbf_gram", c, np.max(np.abs(gram.rbf_gram(X, bw).values - K)), 1e-14)
        record("linear_gram", c, np.max(np.abs(gram.linear_gram(X).values - linear_gram_oracle(X))), 1e-12)
        C = center_oracle(K)
        write_csv(d / "centered_rbf_gram.csv", C)
        record("center", c, np.max(np.abs(gram.center(K).values - C)), 1e-12)
        record("median_bandwidth", c, abs(gram.median_bandwidth(X) - median_distance_oracle(X)), 1e-12)

        k_nn = int(rng.integers(2, 5))
        W = knn_graph_oracle(X, k_nn)
        write_csv(d / f"knn{k_nn}_graph.csv", W)
        record("knn_graph", c, np.max(np.abs(eigenmaps.knn_graph(X, k_nn).weights - W)), 0.0)
        L = laplacian_oracle(W)
        lap = eigenmaps.graph_laplacian(W)
        record("laplacian", c, np.max(np.abs(lap.L - L)), 1e-12)
        try:
            G = eigenmaps.le_gram(lap).values
        except ValueError:
            G = None  # disconnected draw; skip the pseudoinverse check
        if G is not None:
            Lp = pinv_oracle(L)
            write_csv(d / "le_gram.csv", Lp)
            record("le_gram", c, np.max(np.abs(G - Lp)) / np.max(np.abs(Lp)), 1e-8)

        C_X, C_Y = _random_centered_pair(rng, n)
        U, s, Vt = product_svd_oracle(C_X, C_Y)
        k = min(3, n - 1)
        svd = spectral.kernel_svd(C_X, C_Y, k)
        write_csv(d / "product_singular_values.csv", s)
        record("kernel_svd_values", c, np.max(np.abs(svd.singular_values - s[: svd.k]) / s[0]), 1e-10)

        E, Z = rng.standard_normal((20, 2)), rng.standard_normal((20, 2))
        record("procrustes", c, abs(evaluation.procrustes_error(E, Z) - procrustes_oracle(E, Z)), 1e-6)
        A, B = rng.standard_normal((6, 2)), rng.standard_normal((6, 2))
        record("principal_angles", c,
               np.max(np.abs(evaluation.principal_angles(A, B) - principal_angles_oracle_2d(A, B))), 1e-3)

    summary = {"cases": cases, "n": n, "seed": seed, "checks": checks,
               "all_passed": all(ch["passed"] for ch in checks)}
    write_json(out / "oracle_summary.json", summary)
    if not summary["all_passed"]:
        failed = [f"{ch['check']}#{ch['case']}" for ch in checks if not ch["passed"]]
        raise ValueError(f"oracle checks failed: {', '.join(failed)}")
    return summary
