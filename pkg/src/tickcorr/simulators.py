"""Correlated path generators emitting tick series on a 1-second grid.

Five models: geometric Brownian motion, Merton jump-diffusion, Variance
Gamma, GARCH(1,1) diffusion (two variants), and a mean-reverting
Ornstein-Uhlenbeck process. All parameters are quoted per day; one
simulated step is one second, i.e. dt = 1/86400 day unless overridden.

All models run their recursion in log-price space and exponentiate at
the end, so emitted prices are strictly positive by construction.

Randomness
----------
Every simulator derives its generator from the config seed through
``numpy.random.SeedSequence``; replications and experiment grid points
use ``SeedSequence(seed, spawn_key=...)`` so that any single point can
be reproduced in isolation. Within a step, Gaussian draws are
asset-major; the diffusion block is always drawn before model-specific
extras, which makes the Merton model with zero jump intensity
bit-identical to the GBM for the same seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .core import PathBundle, TickSeries

SECONDS_PER_DAY = 86400.0
DEFAULT_DT = 1.0 / SECONDS_PER_DAY


def derive_rng(seed, *spawn_key: int) -> np.random.Generator:
    """Generator for a derived stream: SeedSequence(seed, spawn_key=key)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(spawn_key)))


@dataclass(frozen=True)
class SimConfig:
    """Parameters shared by all simulators.

    ``rho`` is either a scalar pairwise correlation or a full
    correlation matrix; ``model_params`` carries the model-specific
    block (see the individual simulators).
    """

    n_steps: int = 10_000
    dt: float = DEFAULT_DT
    start_price: tuple[float, ...] = (100.0, 100.0)
    mu: tuple[float, ...] = (0.01, 0.01)
    sigma2: tuple[float, ...] = (0.1, 0.2)
    rho: float | tuple = 0.35
    seed: int = 0
    model_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "start_price", tuple(float(x) for x in np.atleast_1d(self.start_price)))
        object.__setattr__(self, "mu", tuple(float(x) for x in np.atleast_1d(self.mu)))
        object.__setattr__(self, "sigma2", tuple(float(x) for x in np.atleast_1d(self.sigma2)))
        if any(p <= 0 for p in self.start_price):
            raise ValueError("start_price must be positive")
        if any(s2 < 0 for s2 in self.sigma2):
            raise ValueError("sigma2 must be non-negative")
        m = self.n_assets
        if not (len(self.mu) == len(self.sigma2) == m):
            raise ValueError("start_price, mu and sigma2 must have equal length")
        self.correlation_matrix()  # validates rho

    @property
    def n_assets(self) -> int:
        return len(self.start_price)

    def correlation_matrix(self) -> np.ndarray:
        m = self.n_assets
        if np.isscalar(self.rho):
            rho = float(self.rho)
            if abs(rho) > 1:
                raise ValueError(f"rho must lie in [-1, 1], got {rho}")
            r = np.full((m, m), rho)
            np.fill_diagonal(r, 1.0)
            return r
        r = np.asarray(self.rho, dtype=np.float64)
        if r.shape != (m, m):
            raise ValueError(f"rho matrix must be {m}x{m}")
        if not np.allclose(r, r.T) or not np.allclose(np.diag(r), 1.0):
            raise ValueError("rho must be a symmetric correlation matrix")
        return r

    @classmethod
    def from_json(cls, text_or_path) -> "SimConfig":
        """Load from a JSON document (a dict of the field names)."""
        if isinstance(text_or_path, (str,)) and text_or_path.lstrip().startswith("{"):
            doc = json.loads(text_or_path)
        else:
            with open(text_or_path) as fh:
                doc = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown SimConfig field(s): {sorted(unknown)}")
        if "rho" in doc and isinstance(doc["rho"], list):
            doc["rho"] = tuple(tuple(row) for row in doc["rho"])
        return cls(**doc)

    def with_(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs)


def _psd_factor(corr: np.ndarray) -> np.ndarray:
    """Cholesky-like factor tolerating zero pivots (|rho| = 1 edge)."""
    m = corr.shape[0]
    a = np.zeros_like(corr)
    for j in range(m):
        pivot = corr[j, j] - np.dot(a[j, :j], a[j, :j])
        if pivot < -1e-10:
            raise ValueError(f"correlation matrix not positive semi-definite: pivot {j} is {pivot:.6g}")
        if pivot <= 0:
            continue  # zero column: perfectly dependent asset
        a[j, j] = np.sqrt(pivot)
        if j + 1 < m:
            a[j + 1 :, j] = (corr[j + 1 :, j] - a[j + 1 :, :j] @ a[j, :j]) / a[j, j]
    return a


def _drive_factor(config: SimConfig) -> np.ndarray:
    """A with A A^T = diag(sig) R diag(sig), daily units."""
    sig = np.sqrt(np.asarray(config.sigma2))
    return sig[:, None] * _psd_factor(config.correlation_matrix())


def _bundle_from_log_paths(log_paths: np.ndarray, config: SimConfig, meta: dict | None = None) -> PathBundle:
    times = np.arange(config.n_steps, dtype=np.float64)
    series = tuple(
        TickSeries(asset_id=f"S{i + 1}", times=times, prices=np.exp(log_paths[:, i]))
        for i in range(config.n_assets)
    )
    return PathBundle.from_series(series, meta=meta)


def simulate_gbm(config: SimConfig, rng: np.random.Generator | None = None) -> PathBundle:
    """Correlated geometric Brownian motion.

    log S_i(t_{k+1}) = log S_i(t_k) + (mu_i - sigma_i^2/2) dt
                       + sqrt(dt) * (A Z_k)_i
    """
    rng = rng or derive_rng(config.seed)
    a = _drive_factor(config)
    mu = np.asarray(config.mu)
    sigma2 = np.asarray(config.sigma2)
    z = rng.standard_normal((config.n_steps - 1, config.n_assets))
    inc = (mu - 0.5 * sigma2) * config.dt + np.sqrt(config.dt) * (z @ a.T)
    logs = np.empty((config.n_steps, config.n_assets))
    logs[0] = np.log(config.start_price)
    logs[1:] = logs[0] + np.cumsum(inc, axis=0)
    return _bundle_from_log_paths(logs, config)


def simulate_merton(config: SimConfig, rng: np.random.Generator | None = None) -> PathBundle:
    """Merton jump-diffusion: GBM plus compound Poisson log-price jumps.

    model_params: ``lam`` (jump intensity per day, per asset), ``a``
    (jump log-size location), ``b`` (jump log-size std).

    The per-step jump term is a*N + b*sqrt(N)*Z2 with N ~
    Poisson(lam*dt); jump draws are independent across assets and drawn
    after the diffusion block, so lam = 0 reproduces the GBM path
    bit-for-bit under the same seed.
    """
    rng = rng or derive_rng(config.seed)
    m = config.n_assets
    p = config.model_params
    lam = np.broadcast_to(np.asarray(p.get("lam", 0.0), dtype=np.float64), (m,))
    a_loc = np.broadcast_to(np.asarray(p.get("a", 0.0), dtype=np.float64), (m,))
    b_std = np.broadcast_to(np.asarray(p.get("b", 0.0), dtype=np.float64), (m,))
    if np.any(lam < 0):
        raise ValueError("jump intensity lam must be non-negative")

    a = _drive_factor(config)
    mu = np.asarray(config.mu)
    sigma2 = np.asarray(config.sigma2)
    z = rng.standard_normal((config.n_steps - 1, m))
    diffusion = (mu - 0.5 * sigma2) * config.dt + np.sqrt(config.dt) * (z @ a.T)

    n_jumps = rng.poisson(np.broadcast_to(lam * config.dt, diffusion.shape))
    z2 = rng.standard_normal(diffusion.shape)
    jumps = _merton_jump_term(n_jumps, z2, a_loc, b_std)

    logs = np.empty((config.n_steps, m))
    logs[0] = np.log(config.start_price)
    logs[1:] = logs[0] + np.cumsum(diffusion + jumps, axis=0)
    return _bundle_from_log_paths(logs, config)


def _merton_jump_term(n_jumps, z2, a_loc, b_std) -> np.ndarray:
    """Compound log-jump per step: a*N + b*sqrt(N)*Z2 (0 where N = 0)."""
    n_jumps = np.asarray(n_jumps, dtype=np.float64)
    return a_loc * n_jumps + b_std * np.sqrt(n_jumps) * np.asarray(z2)


def simulate_variance_gamma(config: SimConfig, rng: np.random.Generator | None = None) -> PathBundle:
    """Variance Gamma: correlated Brownian motion run on a gamma clock.

    model_params: ``beta`` (> 0), the scale of the gamma subordinator.

    One subordinator increment Y ~ Gamma(dt/beta, beta) is drawn per
    step and shared by all assets (the W(G(t)) representation needs a
    common clock for the induced correlation to survive); the log-price
    step is mu_i*Y + sqrt(Y) * (A Z)_i.
    """
    rng = rng or derive_rng(config.seed)
    beta = np.atleast_1d(np.asarray(config.model_params.get("beta", 1.0), dtype=np.float64))
    if np.any(beta <= 0):
        raise ValueError("beta must be positive")
    if beta.size > 1 and not np.all(beta == beta[0]):
        raise ValueError("variance gamma uses one shared subordinator: beta must be common")
    beta = float(beta[0])

    y = rng.gamma(shape=config.dt / beta, scale=beta, size=config.n_steps - 1)
    z = rng.standard_normal((config.n_steps - 1, config.n_assets))
    logs = _vg_path_from_draws(y, z, config)
    return _bundle_from_log_paths(logs, config)


def _vg_path_from_draws(y: np.ndarray, z: np.ndarray, config: SimConfig) -> np.ndarray:
    """Assemble the VG log-path from subordinator and Gaussian draws."""
    a = _drive_factor(config)
    mu = np.asarray(config.mu)
    inc = mu * y[:, None] + np.sqrt(y)[:, None] * (z @ a.T)
    logs = np.empty((config.n_steps, config.n_assets))
    logs[0] = np.log(config.start_price)
    logs[1:] = logs[0] + np.cumsum(inc, axis=0)
    return logs


GARCH_VARIANTS = ("andersen", "reno")


def simulate_garch(
    config: SimConfig,
    variant: str | None = None,
    rng: np.random.Generator | None = None,
) -> PathBundle:
    """GARCH(1,1) diffusion: driftless log-price with stochastic variance.

    model_params: ``theta`` (mean-reversion rate of the variance, per
    day), ``w`` (long-run variance), ``lam_garch`` (variance-of-variance
    level), ``start_variance`` (defaults to ``w``), ``variant``.

    The variance follows an Euler recursion whose diffusion term is
    proportional to the variance itself in the ``andersen`` variant and
    to the volatility in the ``reno`` variant. Euler steps can push the
    variance negative; it is floored at 1e-12 and the number of floor
    events is reported in the bundle meta.
    """
    rng = rng or derive_rng(config.seed)
    m = config.n_assets
    p = config.model_params
    variant = variant or p.get("variant", "andersen")
    if variant not in GARCH_VARIANTS:
        raise ValueError(f"variant must be one of {GARCH_VARIANTS}, got {variant!r}")
    theta = np.broadcast_to(np.asarray(p.get("theta", 0.035), dtype=np.float64), (m,))
    w = np.broadcast_to(np.asarray(p.get("w", 0.5), dtype=np.float64), (m,))
    lam = np.broadcast_to(np.asarray(p.get("lam_garch", 0.3), dtype=np.float64), (m,))
    sig2_0 = np.broadcast_to(np.asarray(p.get("start_variance", w), dtype=np.float64), (m,))
    if np.any(theta <= 0) or np.any(w <= 0) or np.any(lam < 0) or np.any(sig2_0 <= 0):
        raise ValueError("need theta > 0, w > 0, lam_garch >= 0, start_variance > 0")

    n = config.n_steps
    z_var = rng.standard_normal((n - 1, m))
    z_price = rng.standard_normal((n - 1, m))

    sig2 = np.empty((n, m))
    floored = 0
    for i in range(m):
        path, nf = _kernels.garch_variance_scan(
            float(sig2_0[i]), float(theta[i]), float(w[i]), float(lam[i]),
            config.dt, z_var[:, i], variant == "reno",
        )
        sig2[:, i] = path
        floored += nf

    corr_factor = _psd_factor(config.correlation_matrix())
    shocks = z_price @ corr_factor.T
    inc = np.sqrt(config.dt) * np.sqrt(sig2[1:]) * shocks
    logs = np.empty((n, m))
    logs[0] = np.log(config.start_price)
    logs[1:] = logs[0] + np.cumsum(inc, axis=0)
    meta = {"variant": variant, "variance_floor_events": int(floored)}
    return _bundle_from_log_paths(logs, config, meta=meta)


def simulate_ou(config: SimConfig, rng: np.random.Generator | None = None) -> PathBundle:
    """Mean-reverting Ornstein-Uhlenbeck log-price process.

    model_params: ``theta`` (reversion rate per day, > 0) and ``mu_level``
    (long-term price level, > 0). The log price reverts to log(mu_level):

    X_i(t_{k+1}) = X_i(t_k) + theta_i (log mu_i - X_i(t_k)) dt
                   + sqrt(dt) * (A Z_k)_i
    """
    rng = rng or derive_rng(config.seed)
    m = config.n_assets
    p = config.model_params
    theta = np.broadcast_to(np.asarray(p.get("theta", 0.035), dtype=np.float64), (m,))
    level = np.broadcast_to(np.asarray(p.get("mu_level", 100.0), dtype=np.float64), (m,))
    if np.any(theta <= 0) or np.any(level <= 0):
        raise ValueError("need theta > 0 and mu_level > 0")

    a = _drive_factor(config)
    z = rng.standard_normal((config.n_steps - 1, m))
    g = np.sqrt(config.dt) * (z @ a.T)
    log_level = np.log(level)
    pull = theta * config.dt

    logs = np.empty((config.n_steps, m))
    logs[0] = np.log(config.start_price)
    x = logs[0].copy()
    for k in range(config.n_steps - 1):
        x = x + pull * (log_level - x) + g[k]
        logs[k + 1] = x
    return _bundle_from_log_paths(logs, config)


MODEL_NAMES = ("gbm", "merton", "vg", "garch", "ou")


def simulate(model: str, config: SimConfig, rng: np.random.Generator | None = None) -> PathBundle:
    """Dispatch a simulator by model name."""
    if model == "gbm":
        return simulate_gbm(config, rng=rng)
    if model == "merton":
        return simulate_merton(config, rng=rng)
    if model == "vg":
        return simulate_variance_gamma(config, rng=rng)
    if model == "garch":
        return simulate_garch(config, rng=rng)
    if model == "ou":
        return simulate_ou(config, rng=rng)
    raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")
