"""Synthetic two-view data with known latent ground truth.

Every generator takes an integer seed and draws from numpy's PCG64 through a
``SeedSequence``; latent points and each view's noise get their own spawned
stream, so the two noise processes are independent by construction and
samples reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "LinearTwoViewSample",
    "TwoViewSample",
    "SwissRollParams",
    "anisotropic_covariance",
    "linear_two_view",
    "roll",
    "swiss_roll_pair",
]


def _streams(seed: int, count: int):
    ss = np.random.SeedSequence(int(seed))
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(count)]


@dataclass(frozen=True)
class LinearTwoViewSample:
    Z: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    M: np.ndarray
    N: np.ndarray
    sigma_x: float
    sigma_y: float
    seed: int
    noise_cov_x: np.ndarray | None = None
    noise_cov_y: np.ndarray | None = None


def anisotropic_covariance(d: int, condition: float, rng) -> np.ndarray:
    """Random ``d x d`` covariance with mean eigenvalue 1.

    Eigenvalues are log-spaced between 1 and ``1/condition`` before
    normalization, eigenvectors are a random rotation.
    """
    if condition < 1:
        raise ParameterError(f"condition must be >= 1, got {condition}")
    lam = np.geomspace(1.0, 1.0 / condition, d)
    lam /= lam.mean()
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q *= np.sign(np.diag(R))
    return (Q * lam) @ Q.T


def _noise(rng, n, d, sigma, cov):
    if cov is None:
        return sigma * rng.standard_normal((n, d))
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (d, d):
        raise ParameterError(f"noise covariance must be {d}x{d}, got {cov.shape}")
    Lc = np.linalg.cholesky(cov)
    return sigma * rng.standard_normal((n, d)) @ Lc.T


def linear_two_view(
    n: int,
    k_latent: int,
    d_x: int,
    d_y: int,
    sigma_x: float,
    sigma_y: float,
    seed: int,
    noise_cov_x=None,
    noise_cov_y=None,
    anisotropy: float | None = None,
) -> LinearTwoViewSample:
    """Sample ``x_i = M z_i + eps_i``, ``y_i = N z_i + zeta_i``.

    ``Z`` is standard normal and then column-centered; ``M`` and ``N`` have
    orthonormal columns. Noise is Gaussian with covariance
    ``sigma^2 * cov``; ``cov`` defaults to the identity, or to a random
    :func:`anisotropic_covariance` per view when ``anisotropy`` is given, or
    to the explicit ``noise_cov_x`` / ``noise_cov_y``.
    """
    n, k_latent = int(n), int(k_latent)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 1 <= k_latent <= min(d_x, d_y):
        raise ParameterError(
            f"k_latent must satisfy 1 <= k_latent <= min(d_x, d_y) = {min(d_x, d_y)}, got {k_latent}"
        )
    if sigma_x < 0 or sigma_y < 0:
        raise ParameterError("noise scales must be nonnegative")
    latent, maps, nx, ny = _streams(seed, 4)
    Z = latent.standard_normal((n, k_latent))
    Z -= Z.mean(axis=0)
    M, _ = np.linalg.qr(maps.standard_normal((d_x, k_latent)))
    N, _ = np.linalg.qr(maps.standard_normal((d_y, k_latent)))
    if anisotropy is not None:
        if noise_cov_x is None:
            noise_cov_x = anisotropic_covariance(d_x, anisotropy, maps)
        if noise_cov_y is None:
            noise_cov_y = anisotropic_covariance(d_y, anisotropy, maps)
    X = Z @ M.T + _noise(nx, n, d_x, sigma_x, noise_cov_x)
    Y = Z @ N.T + _noise(ny, n, d_y, sigma_y, noise_cov_y)
    return LinearTwoViewSample(
        Z, X, Y, M, N, float(sigma_x), float(sigma_y), int(seed),
        None if noise_cov_x is None else np.asarray(noise_cov_x, float),
        None if noise_cov_y is None else np.asarray(noise_cov_y, float),
    )


@dataclass(frozen=True)
class SwissRollParams:
    """Latent rectangle ``[0, width] x [0, height]`` and the two roll maps.

    View ``f`` uses ``t = a_f + b_f * z_1``, view ``g`` uses
    ``t = a_g + b_g * z_1``; both send ``z`` to ``(t cos t, z_2, t sin t)``.
    """

    width: float = 30.0
    height: float = 40.0
    a_f: float = 1.5 * np.pi
    b_f: float = 1.5 * np.pi / 30.0
    a_g: float = 2.0 * np.pi
    b_g: float = 1.5 * np.pi / 30.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TwoViewSample:
    Z: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    params: SwissRollParams
    sigma_x: float
    sigma_y: float
    seed: int
    meta: dict = field(default_factory=dict)


def roll(Z, a: float, b: float) -> np.ndarray:
    """Swiss-roll map ``z -> (t cos t, z_2, t sin t)`` with ``t = a + b z_1``."""
    Z = np.asarray(Z, dtype=float)
    t = a + b * Z[:, 0]
    return np.column_stack([t * np.cos(t), Z[:, 1], t * np.sin(t)])


def swiss_roll_pair(
    n: int,
    sigma_x: float,
    sigma_y: float,
    seed: int,
    params: SwissRollParams | None = None,
) -> TwoViewSample:
    """Two differently rolled noisy views of one uniform latent rectangle."""
    params = params or SwissRollParams()
    n = int(n)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if sigma_x < 0 or sigma_y < 0:
        raise ParameterError("noise scales must be nonnegative")
    if params.width <= 0 or params.height <= 0:
        raise ParameterError("latent rectangle must have positive width and height")
    latent, nx, ny = _streams(seed, 3)
    Z = latent.uniform(0.0, 1.0, (n, 2)) * [params.width, params.height]
    X = roll(Z, params.a_f, params.b_f) + sigma_x * nx.standard_normal((n, 3))
    Y = roll(Z, params.a_g, params.b_g) + sigma_y * ny.standard_normal((n, 3))
    return TwoViewSample(Z, X, Y, params, float(sigma_x), float(sigma_y), int(seed))


@dataclass(frozen=True)
class CircuitParams:
    """Phase dynamics of a car lapping a closed track.

    ``theta[t+1] = theta[t] + omega * (1 + speed_variation * sin(theta[t])) + process_noise * w_t``.
    Observations are a curved 3-d function of the phase plus Gaussian noise;
    targets are 2-d positions on an elliptical track.
    """

    omega: float = 2.0 * np.pi / 40.0
    speed_variation: float = 0.5
    process_noise: float = 0.01
    obs_noise: float = 0.3
    track_axes: tuple = (2.0, 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TimeSeriesSample:
    observations: np.ndarray
    targets: np.ndarray
    latent: np.ndarray
    seed: int
    meta: dict = field(default_factory=dict)


def circuit_observation(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.column_stack(
        [
            np.cos(theta) + 0.5 * np.cos(2 * theta),
            np.sin(theta) - 0.5 * np.sin(2 * theta),
            0.7 * np.sin(3 * theta),
        ]
    )


def circuit_series(T: int, seed: int, params: CircuitParams | None = None) -> TimeSeriesSample:
    """Noisy observations of a lapping car; targets are its 2-d positions."""
    params = params or CircuitParams()
    T = int(T)
    if T < 1:
        raise ParameterError(f"T must be >= 1, got {T}")
    latent, proc, obs = _streams(seed, 3)
    theta = np.empty(T)
    theta[0] = latent.uniform(0.0, 2.0 * np.pi)
    kicks = params.process_noise * proc.standard_normal(T)
    for t in range(T - 1):
        step = params.omega * (1.0 + params.speed_variation * np.sin(theta[t]))
        theta[t + 1] = theta[t] + step + kicks[t]
    clean = circuit_observation(theta)
    observations = clean + params.obs_noise * obs.standard_normal(clean.shape)
    ax, ay = params.track_axes
    targets = np.column_stack([ax * np.cos(theta), ay * np.sin(theta)])
    return TimeSeriesSample(observations, targets, theta, int(seed), {"params": params.to_dict()})


def linear_system_series(T: int, seed: int, state_dim: int = 2, d_obs: int = 3, obs_noise: float = 0.0) -> TimeSeriesSample:
    """Trajectory of a random stable oscillatory linear system.

    ``x[t+1] = A x[t]``, ``o[t] = C x[t] (+ noise)``; ``A`` is block-diagonal
    with damped rotations, targets are the true states.
    """
    T = int(T)
    if state_dim % 2:
        raise ParameterError("state_dim must be even (rotation blocks)")
    sysrng, init, noise = _streams(seed, 3)
    A = np.zeros((state_dim, state_dim))
    for b in range(state_dim // 2):
        angle = sysrng.uniform(0.1, 0.6)
        radius = sysrng.uniform(0.999, 1.0)
        c, s = np.cos(angle), np.sin(angle)
        A[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] = radius * np.array([[c, -s], [s, c]])
    C = sysrng.standard_normal((d_obs, state_dim))
    x = np.empty((T, state_dim))
    x[0] = init.standard_normal(state_dim) * 3.0
    for t in range(T - 1):
        x[t + 1] = A @ x[t]
    observations = x @ C.T
    if obs_noise:
        observations = observations + obs_noise * noise.standard_normal(observations.shape)
    return TimeSeriesSample(observations, x, x, int(seed), {"A": A.tolist(), "C": C.tolist()})
