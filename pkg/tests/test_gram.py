import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from twomanifold import oracles
from twomanifold.errors import DegenerateInputError, NonFiniteInputError, ParameterError
from twomanifold.gram import center, linear_gram, median_bandwidth, rbf_cross, rbf_gram

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_rbf_identical_points():
    np.testing.assert_array_equal(rbf_gram([[1.0, 2.0], [1.0, 2.0]], 0.7).values, np.ones((2, 2)))


def test_rbf_one_over_e():
    sigma = 1.3
    K = rbf_gram([[0.0], [sigma * np.sqrt(2.0)]], sigma).values
    assert K[0, 1] == pytest.approx(np.exp(-1.0), abs=1e-15)
    assert K[0, 0] == K[1, 1] == 1.0


def test_rbf_matches_entrywise_oracle(rng):
    X = rng.standard_normal((3, 3))
    np.testing.assert_allclose(rbf_gram(X, 0.9).values, oracles.rbf_gram_oracle(X, 0.9), rtol=0, atol=1e-14)


def test_rbf_default_bandwidth_is_median(rng):
    X = rng.standard_normal((10, 2))
    G = rbf_gram(X)
    assert G.bandwidth == median_bandwidth(X)
    assert G.kernel == "rbf"


def test_rbf_rejects_bad_input():
    with pytest.raises(ParameterError):
        rbf_gram([[0.0], [1.0]], 0.0)
    with pytest.raises(ParameterError):
        rbf_gram([[0.0], [1.0]], -1.0)
    with pytest.raises(NonFiniteInputError, match="row 1, column 0"):
        rbf_gram([[0.0], [np.nan]], 1.0)


def test_rbf_cross_matches_square():
    X = np.arange(8.0).reshape(4, 2) / 3
    np.testing.assert_allclose(rbf_cross(X, X, 1.1), rbf_gram(X, 1.1).values, atol=1e-15)


def test_linear_gram_examples(rng):
    np.testing.assert_array_equal(linear_gram([[1.0, 0.0], [0.0, 1.0]]).values, np.eye(2))
    np.testing.assert_array_equal(linear_gram([[1.0, 1.0]]).values, [[2.0]])
    X = rng.standard_normal((4, 3))
    np.testing.assert_allclose(linear_gram(X).values, oracles.linear_gram_oracle(X), atol=1e-14)
    with pytest.raises(NonFiniteInputError):
        linear_gram([[np.inf, 0.0]])


def test_center_examples(rng):
    np.testing.assert_array_equal(center(np.ones((2, 2))).values, np.zeros((2, 2)))
    np.testing.assert_allclose(center(np.eye(2)).values, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-16)
    A = rng.standard_normal((5, 5))
    G = A + A.T
    np.testing.assert_allclose(center(G).values, oracles.center_oracle(G), atol=1e-12)


def test_center_rejects_asymmetric():
    with pytest.raises(ParameterError, match="symmetric"):
        center([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ParameterError, match="square"):
        center(np.ones((2, 3)))


def test_center_keeps_kernel_tag(rng):
    assert center(rbf_gram(rng.standard_normal((4, 2)), 1.0)).kernel == "rbf"


def test_median_bandwidth_examples(rng):
    assert median_bandwidth([[0.0], [2.0]]) == 2.0
    assert median_bandwidth([[0.0], [1.0], [3.0]]) == 2.0
    X = rng.standard_normal((50, 4))
    assert median_bandwidth(X) == pytest.approx(oracles.median_distance_oracle(X), abs=1e-13)


def test_median_bandwidth_degenerate():
    with pytest.raises(DegenerateInputError):
        median_bandwidth([[1.0, 1.0]])
    with pytest.raises(DegenerateInputError):
        median_bandwidth([[1.0], [1.0], [1.0]])


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.tuples(st.integers(2, 12), st.integers(1, 4)), elements=finite))
def test_center_idempotent_and_sums_vanish(X):
    G = rbf_gram(X, 3.0)
    C = center(G).values
    np.testing.assert_allclose(center(C).values, C, atol=1e-12)
    n = C.shape[0]
    bound = 1e-10 * max(np.max(np.abs(C)), 1e-300) * n
    assert np.all(np.abs(C.sum(axis=0)) <= bound + 1e-15)
    assert np.all(np.abs(C.sum(axis=1)) <= bound + 1e-15)
    np.testing.assert_array_equal(C, C.T)


@settings(max_examples=40, deadline=None)
@given(
    arrays(float, st.tuples(st.integers(2, 15), st.integers(1, 4)), elements=finite),
    st.floats(0.1, 20.0),
)
def test_rbf_psd_unit_diagonal_and_bounded(X, bw):
    K = rbf_gram(X, bw).values
    assert np.all(np.diag(K) == 1.0)
    assert np.all((K > 0) | (K == 0)) and np.all(K <= 1.0)
    np.testing.assert_array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() >= -1e-10 * np.trace(K)


@settings(max_examples=30, deadline=None)
@given(arrays(float, st.tuples(st.integers(2, 10), st.just(3)), elements=finite),
       arrays(float, 3, elements=finite))
def test_rbf_translation_invariant(X, shift):
    np.testing.assert_allclose(rbf_gram(X + shift, 2.0).values, rbf_gram(X, 2.0).values, atol=1e-12)


def test_deterministic(rng):
    X = rng.standard_normal((30, 3))
    a, b = center(rbf_gram(X)).values, center(rbf_gram(X.copy())).values
    assert a.tobytes() == b.tobytes()
