"""Spectral system identification with a two-manifold state space.

Pipeline
--------
1. :func:`hankel_windows` cuts a series into paired past/future windows.
2. :func:`learn_state_space` builds centered Grams for futures and pasts
   (RBF, Laplacian-Eigenmaps or linear kernel) and runs instrumental
   eigenmaps on them; the future embedding spans the state space, the past
   embedding is the instrument.
3. :func:`fit_dynamics` fits ridge regressions in that space. The state at
   anchor ``t`` is the future embedding predicted from the (out-of-sample)
   past embedding; ``A`` advances it one step, ``O`` reads out the current
   observation and an optional map reads out side targets.
4. :func:`filter_predict` / :func:`evaluate_prediction` run the
   filter-then-predict protocol and score it by RMSE.

The transition/readout step is a plain regression predictor; it stands in
for the operator-valued HMM parameter estimation normally used on top of
such a state space.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist

from .eigenmaps import graph_laplacian, knn_graph, le_gram
from .errors import DegenerateInputError, ParameterError
from .gram import as_dataset, center, linear_gram, median_bandwidth, rbf_cross, rbf_gram
from .spectral import instrumental_eigenmaps

__all__ = [
    "KernelSpec",
    "WindowPairs",
    "StateSpaceModel",
    "PredictionReport",
    "hankel_windows",
    "learn_state_space",
    "fit_dynamics",
    "filter_predict",
    "evaluate_prediction",
    "persistence_predict",
    "ridge",
]


@dataclass(frozen=True)
class KernelSpec:
    """Which Gram matrix to build for futures and pasts.

    kind : {"rbf", "le", "linear"}
        ``rbf`` uses a Gaussian kernel (median bandwidth per view when
        ``bandwidth`` is None); ``le`` uses the pseudoinverse of a kNN graph
        Laplacian (``k_nn``, ``normalized``, ``graph_mode``); ``linear`` is
        the plain inner product and exists mainly for exact-recovery checks.
    oos_bandwidth_scale, oos_k_nn
        Out-of-sample rule for ``le``: RBF-weighted average of the
        training past embeddings over the ``oos_k_nn`` nearest training
        pasts (all if None), bandwidth = scale * median pairwise distance.
    """

    kind: str = "rbf"
    bandwidth: float | None = None
    k_nn: int = 50
    normalized: bool = True
    graph_mode: str = "binary"
    oos_bandwidth_scale: float = 1.0
    oos_k_nn: int | None = 20

    def __post_init__(self):
        if self.kind not in ("rbf", "le", "linear"):
            raise ParameterError(f"unknown kernel kind {self.kind!r}; expected rbf, le or linear")
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ParameterError("bandwidth must be positive")
        if self.k_nn < 1:
            raise ParameterError("k_nn must be >= 1")
        if self.oos_bandwidth_scale <= 0:
            raise ParameterError("oos_bandwidth_scale must be positive")
        if self.oos_k_nn is not None and self.oos_k_nn < 1:
            raise ParameterError("oos_k_nn must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class WindowPairs:
    """Flattened past/future windows; row ``i`` is anchored at ``anchors[i]``.

    ``futures[i]`` holds observations ``t .. t+future_len-1`` and
    ``pasts[i]`` holds ``t-past_len .. t-1`` (time-major).
    """

    futures: np.ndarray
    pasts: np.ndarray
    anchors: np.ndarray
    past_len: int
    future_len: int
    d_obs: int

    @property
    def n(self) -> int:
        return len(self.anchors)


def hankel_windows(series, future_len: int, past_len: int) -> WindowPairs:
    """Every pair of contiguous past/future windows of a ``T x d`` series."""
    obs = as_dataset(series, "series")
    T, d = obs.shape
    future_len, past_len = int(future_len), int(past_len)
    if future_len < 1 or past_len < 1:
        raise ParameterError("future_len and past_len must be >= 1")
    if T < past_len + future_len:
        raise ParameterError(
            f"series too short: need at least past_len + future_len = {past_len + future_len} "
            f"observations, got {T}"
        )
    anchors = np.arange(past_len, T - future_len + 1)
    # windows[j] = obs[j : j + L] flattened, for every start j
    fut = np.lib.stride_tricks.sliding_window_view(obs, (future_len, d))[:, 0]
    pas = np.lib.stride_tricks.sliding_window_view(obs, (past_len, d))[:, 0]
    futures = fut[anchors].reshape(len(anchors), future_len * d).copy()
    pasts = pas[anchors - past_len].reshape(len(anchors), past_len * d).copy()
    return WindowPairs(futures, pasts, anchors, past_len, future_len, d)


def ridge(X, Y, lam: float, intercept: bool = True):
    """Ridge regression ``Y ~ X W + b`` with an unpenalized intercept.

    The penalty is ``lam * trace(Xc^T Xc) / p`` so ``lam`` is scale free.
    Returns ``(W, b)``. With ``lam == 0`` a rank-deficient design raises.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    p = X.shape[1]
    if intercept:
        mx, my = X.mean(axis=0), Y.mean(axis=0)
    else:
        mx, my = np.zeros(p), np.zeros(Y.shape[1])
    if p == 0:
        return np.zeros((0, Y.shape[1])), my
    Xc, Yc = X - mx, Y - my
    G = Xc.T @ Xc
    if lam < 0:
        raise ParameterError("ridge parameter must be nonnegative")
    if lam == 0:
        if np.linalg.matrix_rank(Xc) < p:
            raise DegenerateInputError(
                "regression design is rank deficient; use a positive ridge parameter"
            )
        W = np.linalg.lstsq(Xc, Yc, rcond=None)[0]
    else:
        scale = np.trace(G) / p
        if scale == 0:
            W = np.zeros((p, Y.shape[1]))
        else:
            W = np.linalg.solve(G + lam * scale * np.eye(p), Xc.T @ Yc)
    return W, my - mx @ W


@dataclass(frozen=True)
class StateSpaceModel:
    """Learned state space plus (after :func:`fit_dynamics`) its dynamics.

    Instances are never mutated; fitting returns a new model.
    """

    kernel: KernelSpec
    k: int
    past_len: int
    future_len: int
    d_obs: int
    E_X: np.ndarray
    E_Y: np.ndarray
    singular_values: np.ndarray
    train_pasts: np.ndarray
    # out-of-sample projection for kernel kinds with a kernel function
    past_bandwidth: float | None = None
    past_gram_colmean: np.ndarray | None = None
    past_gram_mean: float | None = None
    oos_weights: np.ndarray | None = None
    # LE interpolation bandwidth
    oos_bandwidth: float | None = None
    # dynamics
    ridge: float | None = None
    F: np.ndarray | None = None
    f0: np.ndarray | None = None
    A: np.ndarray | None = None
    a0: np.ndarray | None = None
    O: np.ndarray | None = None
    o0: np.ndarray | None = None
    P: np.ndarray | None = None
    p0: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def fitted(self) -> bool:
        return self.A is not None

    @property
    def state_dim(self) -> int:
        return self.E_X.shape[1]

    def project_pasts(self, pasts) -> np.ndarray:
        """Past-embedding coordinates for raw (flattened) past windows."""
        pasts = np.atleast_2d(np.asarray(pasts, dtype=float))
        if pasts.shape[1] != self.train_pasts.shape[1]:
            raise ParameterError(
                f"past windows must have {self.train_pasts.shape[1]} columns, got {pasts.shape[1]}"
            )
        if self.kernel.kind in ("rbf", "linear"):
            if self.kernel.kind == "rbf":
                K = rbf_cross(pasts, self.train_pasts, self.past_bandwidth)
            else:
                K = pasts @ self.train_pasts.T
            Kc = (
                K
                - K.mean(axis=1, keepdims=True)
                - self.past_gram_colmean[None, :]
                + self.past_gram_mean
            )
            return Kc @ self.oos_weights
        return _interpolate(pasts, self.train_pasts, self.E_Y, self.oos_bandwidth, self.kernel.oos_k_nn)

    def filter_state(self, pasts) -> np.ndarray:
        if not self.fitted:
            raise ParameterError("model dynamics are not fitted; call fit_dynamics first")
        return self.project_pasts(pasts) @ self.F + self.f0


def _interpolate(query, train, values, bandwidth, k_nn):
    D2 = cdist(query, train, "sqeuclidean")
    if k_nn is not None and k_nn < train.shape[0]:
        cut = np.partition(D2, k_nn - 1, axis=1)[:, k_nn - 1 : k_nn]
        mask = D2 <= cut
    else:
        mask = np.ones_like(D2, dtype=bool)
    # shift by the row minimum so the nearest weight is exactly 1 (no underflow)
    logw = -(D2 - D2.min(axis=1, keepdims=True)) / (2.0 * bandwidth**2)
    w = np.where(mask, np.exp(logw), 0.0)
    return (w @ values) / w.sum(axis=1, keepdims=True)


def _safe_bandwidth(X):
    try:
        return median_bandwidth(X)
    except DegenerateInputError:
        # all windows identical: any bandwidth gives a constant Gram
        return 1.0


def _centered_gram(X, spec: KernelSpec):
    if spec.kind == "rbf":
        bw = spec.bandwidth if spec.bandwidth is not None else _safe_bandwidth(X)
        return center(rbf_gram(X, bw)), bw
    if spec.kind == "linear":
        return center(linear_gram(X)), None
    graph = knn_graph(X, min(spec.k_nn, X.shape[0] - 1), spec.graph_mode)
    lap = graph_laplacian(graph, spec.normalized)
    return center(le_gram(lap)), None


def learn_state_space(pairs: WindowPairs, k: int, kernel: KernelSpec | None = None) -> StateSpaceModel:
    """Instrumental state space from future (``C_X``) and past (``C_Y``) Grams.

    ``E_X = U diag(s)^{1/2}`` and ``E_Y = V diag(s)^{1/2}`` from the rank-k
    SVD of ``C_X C_Y``. Dynamics are left unfitted.
    """
    kernel = kernel or KernelSpec()
    k = int(k)
    if not 1 <= k <= pairs.n:
        raise ParameterError(f"k must satisfy 1 <= k <= n = {pairs.n}, got {k}")
    C_X, _ = _centered_gram(pairs.futures, kernel)
    C_Y, bw_y = _centered_gram(pairs.pasts, kernel)
    emb = instrumental_eigenmaps(C_X, C_Y, k)
    svd = emb.svd
    extra = {}
    if kernel.kind in ("rbf", "linear"):
        # C_X C_Y = U S V^T  =>  E_Y = C_Y (C_X U S^{-1/2}); apply the same
        # weights to a centered kernel row of a new past window.
        if kernel.kind == "rbf":
            G_Y = rbf_gram(pairs.pasts, bw_y).values
        else:
            G_Y = linear_gram(pairs.pasts).values
        weights = (C_X.values @ svd.U) / np.sqrt(svd.singular_values) if svd.k else np.zeros((pairs.n, 0))
        extra = dict(
            past_bandwidth=bw_y,
            past_gram_colmean=G_Y.mean(axis=0),
            past_gram_mean=float(G_Y.mean()),
            oos_weights=weights,
        )
    else:
        extra = dict(oos_bandwidth=kernel.oos_bandwidth_scale * _safe_bandwidth(pairs.pasts))
    return StateSpaceModel(
        kernel=kernel,
        k=k,
        past_len=pairs.past_len,
        future_len=pairs.future_len,
        d_obs=pairs.d_obs,
        E_X=emb.E_X,
        E_Y=emb.E_Y,
        singular_values=svd.singular_values,
        train_pasts=pairs.pasts,
        meta={"requested_k": k, "state_dim": svd.k},
        **extra,
    )


def fit_dynamics(model: StateSpaceModel, pairs: WindowPairs, ridge_param: float = 1e-6, targets=None) -> StateSpaceModel:
    """Fit filter, transition, observation (and target) regressions.

    Parameters
    ----------
    model : StateSpaceModel
        Output of :func:`learn_state_space` on the same ``pairs``.
    pairs : WindowPairs
        Training windows; consecutive anchors give the transition pairs.
    ridge_param : float
        Scale-free ridge penalty shared by all regressions. 0 means ordinary
        least squares and raises on a rank-deficient design.
    targets : array-like, optional
        ``T x d_target`` side quantities aligned with the training series
        (not used for the state space); fits a state -> target readout.
    """
    if pairs.n != model.E_X.shape[0]:
        raise ParameterError("pairs do not match the windows the state space was learned from")
    e_y = model.project_pasts(pairs.pasts)
    F, f0 = ridge(e_y, model.E_X, ridge_param)
    S = e_y @ F + f0
    A, a0 = ridge(S[:-1], S[1:], ridge_param)
    obs_now = pairs.futures[:, : pairs.d_obs]
    O, o0 = ridge(S, obs_now, ridge_param)
    P = p0 = None
    if targets is not None:
        targets = as_dataset(targets, "targets")
        T_needed = pairs.anchors[-1] + pairs.future_len
        if targets.shape[0] < T_needed:
            raise ParameterError(f"targets must cover the training series ({T_needed} rows)")
        P, p0 = ridge(S, targets[pairs.anchors], ridge_param)
    meta = dict(model.meta, dynamics="linear ridge regression in the learned state space")
    return replace(model, ridge=float(ridge_param), F=F, f0=f0, A=A, a0=a0, O=O, o0=o0, P=P, p0=p0, meta=meta)


def filter_predict(model: StateSpaceModel, series, t1: int, t2_max: int, output: str = "observations") -> np.ndarray:
    """Filter on observations before ``t1`` and predict ``t2_max`` steps.

    Row ``h - 1`` of the result predicts time ``t1 + h - 1`` (horizon ``h``):
    the filtered state is read out directly for ``h = 1`` and advanced by
    the transition map once per further step. Only observations
    ``t1 - past_len .. t1 - 1`` are used.
    """
    obs = as_dataset(series, "series")
    if not model.fitted:
        raise ParameterError("model dynamics are not fitted; call fit_dynamics first")
    if obs.shape[1] != model.d_obs:
        raise ParameterError(f"series must have {model.d_obs} columns, got {obs.shape[1]}")
    t1, t2_max = int(t1), int(t2_max)
    if not model.past_len <= t1 <= obs.shape[0]:
        raise ParameterError(
            f"t1 must satisfy past_len = {model.past_len} <= t1 <= T = {obs.shape[0]}, got {t1}"
        )
    if t2_max < 0:
        raise ParameterError("t2_max must be >= 0")
    if output == "observations":
        R, r0 = model.O, model.o0
    elif output == "targets":
        if model.P is None:
            raise ParameterError("model has no target readout; pass targets to fit_dynamics")
        R, r0 = model.P, model.p0
    else:
        raise ParameterError(f"output must be 'observations' or 'targets', got {output!r}")
    out = np.empty((t2_max, R.shape[1]))
    if t2_max == 0:
        return out
    s = model.filter_state(obs[t1 - model.past_len : t1].reshape(1, -1))[0]
    for h in range(t2_max):
        out[h] = s @ R + r0
        s = s @ model.A + model.a0
    return out


def persistence_predict(series, t1: int, t2_max: int) -> np.ndarray:
    """Baseline that repeats the value at ``t1 - 1`` for every horizon."""
    obs = as_dataset(series, "series")
    return np.repeat(obs[t1 - 1 : t1], t2_max, axis=0)


@dataclass(frozen=True)
class PredictionReport:
    """RMSE per (filter extent, horizon) and its mean over extents."""

    t1: np.ndarray
    horizons: np.ndarray
    rmse: np.ndarray  # shape (len(t1), len(horizons))
    meta: dict = field(default_factory=dict)

    @property
    def per_horizon(self) -> np.ndarray:
        """Root of the mean squared error over all extents, per horizon."""
        return np.sqrt(np.mean(self.rmse**2, axis=0))

    def at(self, horizon: int) -> float:
        idx = np.flatnonzero(self.horizons == horizon)
        if not idx.size:
            raise KeyError(horizon)
        return float(self.per_horizon[idx[0]])

    def to_dict(self) -> dict:
        return {
            "t1": self.t1.tolist(),
            "horizons": self.horizons.tolist(),
            "per_horizon_rmse": self.per_horizon.tolist(),
            "meta": self.meta,
        }


def evaluate_prediction(model, series, targets, t1_values, horizons, output: str = "targets") -> PredictionReport:
    """Score filter-then-predict against ``targets`` on a shared timeline.

    ``model`` is a fitted :class:`StateSpaceModel` or any callable
    ``predict(series, t1, t2_max) -> (t2_max, d)``. Cell ``(i, j)`` holds the
    RMSE (over target coordinates) at extent ``t1_values[i]`` and horizon
    ``horizons[j]``.
    """
    obs = as_dataset(series, "series")
    tgt = as_dataset(targets, "targets")
    if tgt.shape[0] != obs.shape[0]:
        raise ParameterError(f"targets ({tgt.shape[0]} rows) must align with the series ({obs.shape[0]} rows)")
    t1_values = np.asarray(t1_values, dtype=int)
    horizons = np.asarray(horizons, dtype=int)
    if horizons.size == 0 or horizons.min() < 1:
        raise ParameterError("horizons must be >= 1")
    h_max = int(horizons.max())
    if t1_values.max() + h_max - 1 >= obs.shape[0]:
        raise ParameterError("largest t1 plus horizon runs past the end of the series")
    if isinstance(model, StateSpaceModel):
        def predict(s, t1, h):
            return filter_predict(model, s, t1, h, output=output)
    else:
        predict = model
    rmse = np.empty((len(t1_values), len(horizons)))
    for i, t1 in enumerate(t1_values):
        pred = predict(obs, int(t1), h_max)
        truth = tgt[t1 : t1 + h_max]
        err = np.sqrt(np.mean((pred - truth) ** 2, axis=1))
        rmse[i] = err[horizons - 1]
    return PredictionReport(t1_values, horizons, rmse)
