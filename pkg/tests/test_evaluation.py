import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from twomanifold import oracles
from twomanifold.errors import DegenerateInputError, ParameterError
from twomanifold.evaluation import (
    alignment_report,
    neighborhood_preservation,
    principal_angles,
    procrustes_align,
    procrustes_error,
)


def test_procrustes_identity(rng):
    Z = rng.standard_normal((30, 2))
    assert procrustes_error(Z, Z) < 1e-12


def test_procrustes_similarity_recovered(rng):
    Z = rng.standard_normal((40, 3))
    R = special_ortho_group.rvs(3, random_state=1)
    E = 2.0 * Z @ R + np.array([1.0, -3.0, 0.5])
    rep = procrustes_align(E, Z)
    assert rep.procrustes_error < 1e-12
    assert rep.scale == pytest.approx(0.5)
    np.testing.assert_allclose(rep.scale * E @ rep.rotation + rep.translation, Z, atol=1e-12)


def test_procrustes_reflection_allowed(rng):
    Z = rng.standard_normal((20, 2))
    assert procrustes_error(Z * [1, -1], Z) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_procrustes_matches_angle_search(seed):
    rng = np.random.default_rng(seed)
    E, Z = rng.standard_normal((50, 2)), rng.standard_normal((50, 2))
    assert procrustes_error(E, Z) == pytest.approx(oracles.procrustes_oracle(E, Z), abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 10.0))
def test_procrustes_similarity_invariant(seed, s):
    rng = np.random.default_rng(seed)
    E, Z = rng.standard_normal((25, 3)), rng.standard_normal((25, 3))
    R = special_ortho_group.rvs(3, random_state=seed % 1000)
    base = procrustes_error(E, Z)
    assert procrustes_error(s * E @ R + 4.0, Z) == pytest.approx(base, abs=1e-10)
    assert procrustes_error(E, s * Z @ R - 1.0) == pytest.approx(base, abs=1e-10)


def test_procrustes_errors(rng):
    with pytest.raises(ParameterError):
        procrustes_error(np.zeros((5, 2)), np.zeros((5, 3)))
    with pytest.raises(ParameterError):
        procrustes_error(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(DegenerateInputError):
        procrustes_error(rng.standard_normal((5, 2)), np.ones((5, 2)))
    assert procrustes_error(np.ones((5, 2)), rng.standard_normal((5, 2))) == pytest.approx(1.0)


def test_principal_angles_basic(rng):
    A = rng.standard_normal((6, 2))
    np.testing.assert_allclose(principal_angles(A, A @ [[2.0, 1.0], [0.0, 1.0]]), 0, atol=1e-7)
    I = np.eye(4)
    np.testing.assert_allclose(principal_angles(I[:, :2], I[:, 2:]), np.pi / 2)


def test_principal_angles_small_angle_accuracy():
    eps = 1e-9
    A = np.array([[1.0], [0.0]])
    B = np.array([[np.cos(eps)], [np.sin(eps)]])
    assert principal_angles(A, B)[0] == pytest.approx(eps, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_principal_angles_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.standard_normal((6, 2)), rng.standard_normal((6, 2))
    got = principal_angles(A, B)
    np.testing.assert_allclose(got, oracles.principal_angles_oracle_2d(A, B), atol=1e-3)
    np.testing.assert_allclose(principal_angles(B, A), got, atol=1e-12)
    assert np.all(np.diff(got) >= 0)


def test_principal_angles_rank_deficient():
    with pytest.raises(ValueError, match="rank deficient"):
        principal_angles(np.ones((4, 2)), np.eye(4)[:, :2])


def test_neighborhood_identity_and_chance(rng):
    Z = rng.standard_normal((300, 2))
    assert neighborhood_preservation(Z, Z, 10) == 1.0
    vals = [neighborhood_preservation(Z[rng.permutation(300)], Z, 10) for _ in range(5)]
    assert np.mean(vals) == pytest.approx(10 / 299, abs=0.02)
    with pytest.raises(ParameterError):
        neighborhood_preservation(Z, Z, 300)


def test_alignment_report_dict(rng):
    Z = rng.standard_normal((30, 2))
    d = alignment_report(Z + 1.0, Z, k_nn=5).to_dict()
    assert d["procrustes_error"] < 1e-12 and d["neighborhood_overlap"] == 1.0
