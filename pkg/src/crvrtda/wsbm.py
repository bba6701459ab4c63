"""Weighted stochastic block model fit by coordinate-ascent variational Bayes.

Edge existence is Bernoulli with a Beta prior; edge weights are Normal with
a Normal-Gamma prior on (mean, precision). The two log-likelihood families
are mixed as

    alpha * (edge log-likelihood) + (1 - alpha) * (weight log-likelihood)

where the edge terms run over every vertex pair and the weight terms over
pairs that carry an edge (weight above ``floor``). Tempering a conjugate
likelihood by a constant power keeps it conjugate, so every update and the
free energy are available in closed form.

The variational family is mean-field: one categorical per vertex and one
Beta x Normal-Gamma per unordered block pair. Vertex labels have a uniform
prior over the K blocks.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.special import betaln, digamma, gammaln

from .netgen import RNG_NAME
from .network import WeightedNetwork

LOG_2PI = math.log(2 * math.pi)


class WsbmNumericError(FloatingPointError):
    """Posterior parameters left their valid range."""


@dataclass(frozen=True)
class WsbmConfig:
    K: int = 4
    alpha: float = 0.5
    edge_prior: tuple[float, float] = (1.0, 1.0)
    # (mu0, kappa0, shape0, rate0)
    weight_prior: tuple[float, float, float, float] = (0.0, 0.1, 1.0, 1.0)
    floor: float = 0.0
    max_iter: int = 200
    tol: float = 1e-6
    restarts: int = 5
    seed: int = 0
    # "kmeans": k-means++ on weight rows blended with a Dirichlet draw; "dirichlet": Dirichlet(1) only
    init: str = "kmeans"

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        a0, b0 = self.edge_prior
        _, k0, g0, h0 = self.weight_prior
        if min(a0, b0, k0, g0, h0) <= 0:
            raise ValueError("prior hyperparameters must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("max_iter and restarts must be >= 1")
        if self.init not in ("kmeans", "dirichlet"):
            raise ValueError(f"init must be 'kmeans' or 'dirichlet', got {self.init!r}")
        object.__setattr__(self, "edge_prior", tuple(float(x) for x in self.edge_prior))
        object.__setattr__(self, "weight_prior", tuple(float(x) for x in self.weight_prior))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["edge_prior"] = list(self.edge_prior)
        d["weight_prior"] = list(self.weight_prior)
        return d


@dataclass(frozen=True)
class BlockParams:
    """Point parameters per block pair, all K x K symmetric."""

    edge_prob: np.ndarray
    weight_mean: np.ndarray
    weight_var: np.ndarray


@dataclass
class WsbmState:
    responsibilities: np.ndarray
    # Beta(a, b) per block pair
    edge_a: np.ndarray
    edge_b: np.ndarray
    # Normal-Gamma(mean, kappa, shape, rate) per block pair
    w_mean: np.ndarray
    w_kappa: np.ndarray
    w_shape: np.ndarray
    w_rate: np.ndarray
    free_energy_trace: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def K(self) -> int:
        return self.responsibilities.shape[1]

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.responsibilities, axis=1)

    @property
    def edge_prob_mean(self) -> np.ndarray:
        return self.edge_a / (self.edge_a + self.edge_b)

    @property
    def free_energy(self) -> float:
        return self.free_energy_trace[-1] if self.free_energy_trace else -math.inf


@dataclass
class WsbmFit:
    state: WsbmState
    labels: np.ndarray
    config: WsbmConfig
    restart: int
    restart_free_energies: list[float]

    @property
    def converged(self) -> bool:
        return self.state.converged

    def report(self) -> dict:
        s = self.state
        return {
            "config": self.config.to_dict(),
            "rng": RNG_NAME,
            "best_restart": self.restart,
            "restart_free_energies": [float(x) for x in self.restart_free_energies],
            "converged": bool(s.converged),
            "free_energy_trace": [float(x) for x in s.free_energy_trace],
            "labels": [int(x) for x in self.labels],
            "edge_prob": s.edge_prob_mean.tolist(),
            "weight_mean": s.w_mean.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.report(), indent=2, sort_keys=True)


# ------------------------------------------------------------ data / stats

@dataclass(frozen=True)
class _Data:
    pair: np.ndarray    # 1 off the diagonal
    edge: np.ndarray    # e_ij
    ex: np.ndarray      # e_ij x_ij
    exx: np.ndarray     # e_ij x_ij^2


def _data(net: WeightedNetwork, floor: float) -> _Data:
    w = net.weights
    n = net.n
    pair = 1.0 - np.eye(n)
    e = (w > floor).astype(float) * pair
    return _Data(pair, e, e * w, e * w * w)


def _unordered(phi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum over i<j of x_ij attributed to unordered block pair {r, s}."""
    m = phi.T @ x @ phi
    return m - np.diag(np.diag(m)) / 2.0


def _block_stats(phi: np.ndarray, data: _Data):
    return (_unordered(phi, data.pair), _unordered(phi, data.edge),
            _unordered(phi, data.ex), _unordered(phi, data.exx))


# ------------------------------------------------------------- likelihood

def log_likelihood(net: WeightedNetwork, labels, params: BlockParams, alpha: float,
                   floor: float = 0.0) -> float:
    """Mixed Bernoulli/Normal log-likelihood of a hard block assignment."""
    labels = np.asarray(labels, dtype=int)
    K = params.edge_prob.shape[0]
    if labels.shape != (net.n,):
        raise ValueError("need one label per vertex")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= K:
        raise ValueError(f"labels must lie in [0, {K})")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    iu, ju = np.triu_indices(net.n, k=1)
    r, s = labels[iu], labels[ju]
    x = net.weights[iu, ju]
    e = x > floor
    theta = params.edge_prob[r, s]
    total = 0.0
    if alpha > 0:
        with np.errstate(divide="ignore"):
            ll_e = np.where(e, np.log(theta), np.log1p(-theta))
        total += alpha * float(ll_e.sum())
    if alpha < 1 and e.any():
        mu = params.weight_mean[r, s][e]
        var = params.weight_var[r, s][e]
        ll_w = -0.5 * (LOG_2PI + np.log(var)) - 0.5 * (x[e] - mu) ** 2 / var
        total += (1 - alpha) * float(ll_w.sum())
    return total


# --------------------------------------------------------- variational core

def _expected_coeffs(state: WsbmState, alpha: float):
    """Per block pair: expected log-likelihood = c0 + e*ce + e*x*cx + e*x^2*cxx."""
    c = 1.0 - alpha
    dg_ab = digamma(state.edge_a + state.edge_b)
    e_log_t = digamma(state.edge_a) - dg_ab
    e_log_1mt = digamma(state.edge_b) - dg_ab
    e_lam = state.w_shape / state.w_rate
    e_log_lam = digamma(state.w_shape) - np.log(state.w_rate)
    c0 = alpha * e_log_1mt
    ce = (alpha * (e_log_t - e_log_1mt)
          + c * (0.5 * e_log_lam - 0.5 * LOG_2PI - 0.5 * (e_lam * state.w_mean ** 2 + 1.0 / state.w_kappa)))
    cx = c * e_lam * state.w_mean
    cxx = -0.5 * c * e_lam
    return c0, ce, cx, cxx


def _update_theta(state: WsbmState, data: _Data, cfg: WsbmConfig) -> None:
    a0, b0 = cfg.edge_prior
    mu0, k0, g0, h0 = cfg.weight_prior
    alpha, c = cfg.alpha, 1.0 - cfg.alpha
    n_pair, n_edge, s_x, s_xx = _block_stats(state.responsibilities, data)
    state.edge_a = a0 + alpha * n_edge
    state.edge_b = b0 + alpha * np.maximum(n_pair - n_edge, 0.0)
    n = c * n_edge
    s1 = c * s_x
    s2 = c * s_xx
    kappa = k0 + n
    mean = (k0 * mu0 + s1) / kappa
    # h0 + 1/2 (sum c (x - xbar)^2 + k0 n/(k0+n) (xbar - mu0)^2), written cancellation-free
    with np.errstate(invalid="ignore", divide="ignore"):
        xbar = np.where(n > 0, s1 / np.where(n > 0, n, 1.0), 0.0)
    scatter = np.maximum(s2 - 2 * xbar * s1 + n * xbar ** 2, 0.0)
    state.w_rate = h0 + 0.5 * (scatter + k0 * n / kappa * (xbar - mu0) ** 2)
    state.w_kappa = kappa
    state.w_mean = mean
    state.w_shape = g0 + n / 2.0
    for name in ("edge_a", "edge_b", "w_kappa", "w_shape", "w_rate"):
        arr = getattr(state, name)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise WsbmNumericError(f"degenerate posterior parameter {name}: {arr}")


def _update_z(state: WsbmState, data: _Data, cfg: WsbmConfig, order) -> None:
    phi = state.responsibilities
    c0, ce, cx, cxx = _expected_coeffs(state, cfg.alpha)
    log_prior = -math.log(cfg.K)
    for i in order:
        others = phi.sum(axis=0) - phi[i]
        score = (c0 @ others + ce @ (data.edge[i] @ phi) + cx @ (data.ex[i] @ phi)
                 + cxx @ (data.exx[i] @ phi) + log_prior)
        score -= score.max()
        p = np.exp(score)
        phi[i] = p / p.sum()


def _kl_beta(a, b, a0, b0):
    return (betaln(a0, b0) - betaln(a, b) + (a - a0) * digamma(a) + (b - b0) * digamma(b)
            + (a0 - a + b0 - b) * digamma(a + b))


def _kl_normal_gamma(m, k, g, h, mu0, k0, g0, h0):
    kl_gamma = (g - g0) * digamma(g) - gammaln(g) + gammaln(g0) + g0 * (np.log(h) - np.log(h0)) + g * (h0 - h) / h
    kl_normal = 0.5 * (np.log(k / k0) + k0 / k - 1.0 + k0 * (g / h) * (m - mu0) ** 2)
    return kl_gamma + kl_normal


def free_energy(net_or_data, state: WsbmState, cfg: WsbmConfig) -> float:
    """Evidence lower bound E_q[log p(A, z, theta) - log q(z, theta)]."""
    data = net_or_data if isinstance(net_or_data, _Data) else _data(net_or_data, cfg.floor)
    phi = state.responsibilities
    K = phi.shape[1]
    c0, ce, cx, cxx = _expected_coeffs(state, cfg.alpha)
    n_pair, n_edge, s_x, s_xx = _block_stats(phi, data)
    upper = np.triu(np.ones((K, K), dtype=bool))
    expected_ll = float(np.sum((c0 * n_pair + ce * n_edge + cx * s_x + cxx * s_xx)[upper]))
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(np.where(phi > 0, phi * np.log(phi), 0.0))
    label_term = float(ent) - phi.shape[0] * math.log(K)
    a0, b0 = cfg.edge_prior
    mu0, k0, g0, h0 = cfg.weight_prior
    kl = _kl_beta(state.edge_a, state.edge_b, a0, b0)
    kl += _kl_normal_gamma(state.w_mean, state.w_kappa, state.w_shape, state.w_rate, mu0, k0, g0, h0)
    value = expected_ll + label_term - float(np.sum(kl[upper]))
    if not math.isfinite(value):
        raise WsbmNumericError(f"free energy not finite: ll={expected_ll}, labels={label_term}")
    return value


def _prior_state(n: int, cfg: WsbmConfig) -> WsbmState:
    K = cfg.K
    a0, b0 = cfg.edge_prior
    mu0, k0, g0, h0 = cfg.weight_prior
    full = lambda v: np.full((K, K), float(v))
    return WsbmState(np.full((n, K), 1.0 / K), full(a0), full(b0), full(mu0), full(k0), full(g0), full(h0))


def initial_responsibilities(net: WeightedNetwork, cfg: WsbmConfig, rng: np.random.Generator) -> np.ndarray:
    """Random starting point for one restart.

    A pure Dirichlet(1) start almost always collapses to the symmetric
    fixed point where every block pair has the global weight mean, so by
    default the start is 0.9 * (k-means++ one-hot on weight rows) + 0.1 *
    Dirichlet(1).
    """
    n, K = net.n, cfg.K
    noise = rng.dirichlet(np.ones(K), size=n)
    if cfg.init == "dirichlet" or K == 1 or K >= n:
        return noise
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, lab = kmeans2(net.weights, K, minit="++", seed=rng)
    return 0.9 * np.eye(K)[lab] + 0.1 * noise


def fit_single(net: WeightedNetwork, cfg: WsbmConfig, init: np.ndarray | None = None,
               rng: np.random.Generator | None = None) -> WsbmState:
    """One coordinate-ascent run from ``init`` (or a seeded random start)."""
    data = _data(net, cfg.floor)
    n = net.n
    state = _prior_state(n, cfg)
    if init is None:
        rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        init = initial_responsibilities(net, cfg, rng)
    init = np.array(init, dtype=float)
    if init.shape != (n, cfg.K):
        raise ValueError(f"init must have shape {(n, cfg.K)}")
    state.responsibilities = init / init.sum(axis=1, keepdims=True)
    _update_theta(state, data, cfg)
    state.free_energy_trace.append(free_energy(data, state, cfg))
    order = range(n)
    for _ in range(cfg.max_iter):
        _update_z(state, data, cfg, order)
        _update_theta(state, data, cfg)
        state.free_energy_trace.append(free_energy(data, state, cfg))
        if abs(state.free_energy_trace[-1] - state.free_energy_trace[-2]) < cfg.tol:
            state.converged = True
            break
    return state


def fit(net: WeightedNetwork, cfg: WsbmConfig = WsbmConfig()) -> WsbmFit:
    """Best of ``cfg.restarts`` seeded runs by final free energy.

    Ties go to the lower restart index. Non-convergence is reported through
    ``WsbmFit.converged`` rather than raised.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best, best_idx, energies = None, -1, []
    for idx, ss in enumerate(seeds):
        state = fit_single(net, cfg, rng=np.random.Generator(np.random.PCG64(ss)))
        energies.append(state.free_energy)
        if best is None or state.free_energy > best.free_energy:
            best, best_idx = state, idx
    return WsbmFit(best, best.labels, cfg, best_idx, energies)


# ----------------------------------------------------------------------- ARI

def ari(labels_a, labels_b) -> float:
    """Adjusted Rand index between two labelings."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"labelings must be 1-d of equal length, got {a.shape} and {b.shape}")
    n = len(a)
    if n < 2:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai.ravel(), bi.ravel()), 1)
    pairs = lambda x: x * (x - 1) / 2.0
    sum_ij = pairs(table).sum()
    sum_a = pairs(table.sum(axis=1)).sum()
    sum_b = pairs(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / pairs(n)
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # only when both are all-one-cluster or both all-singletons
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))
