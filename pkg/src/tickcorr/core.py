"""Shared domain types and base numerics for tick-data covariance work.

Everything here is a pure function over immutable values: the container
types freeze their arrays on construction so that instances can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=dtype)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TickSeries:
    """One asset's event stream: (time, price, volume) triples.

    Times are plain seconds within a session window, non-decreasing.
    Volumes default to 1 so simulator output is a valid series.
    """

    asset_id: str
    times: np.ndarray
    prices: np.ndarray
    volumes: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        times = _frozen_array(self.times)
        prices = _frozen_array(self.prices)
        if self.volumes is None:
            volumes = _frozen_array(np.ones(len(times)), dtype=np.int64)
        else:
            volumes = _frozen_array(self.volumes, dtype=np.int64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "volumes", volumes)

        n = len(times)
        if n < 1:
            raise ValueError(f"{self.asset_id}: series must hold at least one tick")
        if len(prices) != n or len(volumes) != n:
            raise ValueError(
                f"{self.asset_id}: times/prices/volumes lengths differ "
                f"({n}/{len(prices)}/{len(volumes)})"
            )
        if not np.all(np.isfinite(times)):
            raise ValueError(f"{self.asset_id}: non-finite time stamp")
        if np.any(np.diff(times) < 0):
            raise ValueError(f"{self.asset_id}: times must be non-decreasing")
        if not np.all(prices > 0):
            raise ValueError(f"{self.asset_id}: prices must be strictly positive")
        if np.any(volumes < 1):
            raise ValueError(f"{self.asset_id}: volumes must be >= 1")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.times) > 0))


@dataclass(frozen=True)
class PathBundle:
    """A set of tick series over one shared clock window.

    The window is pinned to the global min/max event time across all
    series; estimators relying on a common phase origin depend on this.
    """

    series: tuple[TickSeries, ...]
    window: tuple[float, float]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if not self.series:
            raise ValueError("bundle must hold at least one series")
        lo = min(float(s.times[0]) for s in self.series)
        hi = max(float(s.times[-1]) for s in self.series)
        t_min, t_max = self.window
        if not (np.isclose(t_min, lo) and np.isclose(t_max, hi)):
            raise ValueError(
                f"window {self.window} does not match event extremes ({lo}, {hi})"
            )
        object.__setattr__(self, "window", (float(t_min), float(t_max)))

    @classmethod
    def from_series(cls, series: Sequence[TickSeries], meta: dict | None = None) -> "PathBundle":
        series = tuple(series)
        if not series:
            raise ValueError("bundle must hold at least one series")
        lo = min(float(s.times[0]) for s in series)
        hi = max(float(s.times[-1]) for s in series)
        return cls(series=series, window=(lo, hi), meta=meta or {})

    def __len__(self) -> int:
        return len(self.series)

    @property
    def asset_ids(self) -> list[str]:
        return [s.asset_id for s in self.series]


@dataclass(frozen=True)
class RescaledTimes:
    """Event times mapped onto [0, 2*pi], one array per source series."""

    tau: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(_frozen_array(t) for t in self.tau))


@dataclass(frozen=True)
class CovarianceResult:
    """Integrated covariance matrix and the correlation matrix derived from it.

    ``rho`` is reported raw: finite-sample estimates may leave [-1, 1], in
    which case ``rho_out_of_range`` is set instead of clamping.
    """

    sigma: np.ndarray
    rho: np.ndarray
    estimator_tag: str
    asset_ids: tuple[str, ...]
    cutoff_used: int | None = None
    rho_out_of_range: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen_array(self.sigma))
        object.__setattr__(self, "rho", _frozen_array(self.rho))
        object.__setattr__(self, "asset_ids", tuple(self.asset_ids))


def correlation_from_sigma(sigma: np.ndarray) -> tuple[np.ndarray, bool]:
    """rho_ij = sigma_ij / sqrt(sigma_ii * sigma_jj), exact unit diagonal.

    Returns the matrix and a flag marking any |rho| > 1 off the diagonal.
    """
    d = np.sqrt(np.diag(sigma))
    rho = sigma / np.outer(d, d)
    np.fill_diagonal(rho, 1.0)
    off = ~np.eye(len(rho), dtype=bool)
    return rho, bool(np.any(np.abs(rho[off]) > 1.0))


def rescale_times(bundle: PathBundle) -> RescaledTimes:
    """Map all event times onto [0, 2*pi] with one global affine map.

    The global window (not per-asset windows) is used so that phases stay
    aligned between assets.
    """
    t_min, t_max = bundle.window
    span = t_max - t_min
    if span <= 0:
        raise ValueError("zero-length window")
    tau = tuple(TWO_PI * (s.times - t_min) / span for s in bundle.series)
    return RescaledTimes(tau=tau)


def log_returns(series: TickSeries) -> np.ndarray:
    """Log price differences over consecutive ticks (length n-1)."""
    if len(series) < 2:
        raise ValueError(f"{series.asset_id}: insufficient data (need >= 2 ticks)")
    if not series.strictly_increasing:
        raise ValueError(f"{series.asset_id}: times must be strictly increasing")
    return np.diff(np.log(series.prices))


def cholesky(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular factor A with A @ A.T == sigma.

    Runs a plain pivot-by-pivot factorisation so a non-positive-definite
    input can be reported with the pivot index at which it failed.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError("covariance matrix must be square")
    if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=0.0):
        raise ValueError("covariance matrix must be symmetric")
    m = sigma.shape[0]
    a = np.zeros_like(sigma)
    for j in range(m):
        pivot = sigma[j, j] - np.dot(a[j, :j], a[j, :j])
        if pivot <= 0:
            raise ValueError(f"matrix not positive-definite: pivot {j} is {pivot:.6g}")
        a[j, j] = np.sqrt(pivot)
        if j + 1 < m:
            a[j + 1 :, j] = (sigma[j + 1 :, j] - a[j + 1 :, :j] @ a[j, :j]) / a[j, j]
    return a
