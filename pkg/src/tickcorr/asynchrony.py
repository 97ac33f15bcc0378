"""Transformations that induce (or remove) asynchrony on tick series.

Missing-data decimation drops a random subset of observations;
exponential sampling re-reads a gridded path at random arrival times;
forced synchronisation projects one series onto another's clock. The
sampling rule everywhere is previous-tick (last observation carried
forward).
"""

from __future__ import annotations

import numpy as np

from .core import TickSeries
from .simulators import derive_rng


def decimate_missing(series: TickSeries, fraction: float, seed) -> TickSeries:
    """Remove a random fraction of the observations.

    Keeps exactly round((1 - fraction) * n) ticks, chosen uniformly at
    random with original order preserved. The first observation is
    always retained so the window start survives decimation.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction must lie in [0, 1)")
    n = len(series)
    keep = int(round((1.0 - fraction) * n))
    if keep < 2:
        raise ValueError(f"{series.asset_id}: result shorter than 2 ticks ({keep})")
    if keep == n:
        return series
    rng = derive_rng(seed)
    rest = rng.choice(np.arange(1, n), size=keep - 1, replace=False)
    idx = np.concatenate(([0], np.sort(rest)))
    return TickSeries(
        asset_id=series.asset_id,
        times=series.times[idx],
        prices=series.prices[idx],
        volumes=series.volumes[idx],
    )


def exponential_sample(series: TickSeries, mean_gap: float, seed) -> TickSeries:
    """Re-sample a gridded path at exponential inter-arrival times.

    Arrival times are cumulative Exp(mean_gap) draws from the window
    start, rounded down to the source grid and deduplicated; each
    arrival reads the most recent grid price (previous tick).
    """
    if mean_gap <= 0:
        raise ValueError("mean_gap must be positive")
    t = series.times
    offsets = t - t[0]
    on_grid = (
        np.max(np.abs(offsets - np.arange(len(series)))) <= 1e-9 if len(series) > 1 else False
    )
    if not on_grid:
        raise ValueError(f"{series.asset_id}: series must sit on a 1-second grid")
    span = float(t[-1] - t[0])

    rng = derive_rng(seed)
    arrivals = []
    total = 0.0
    batch = max(16, int(span / mean_gap * 1.25) + 16)
    while total <= span:
        gaps = rng.exponential(mean_gap, size=batch)
        cum = total + np.cumsum(gaps)
        arrivals.append(cum)
        total = float(cum[-1])
    arrivals = np.concatenate(arrivals)
    arrivals = arrivals[arrivals <= span]
    if arrivals.size == 0:
        raise ValueError(f"{series.asset_id}: no arrivals inside window")
    grid_idx = np.unique(np.floor(arrivals).astype(np.int64))
    if grid_idx.size < 2:
        raise ValueError(f"{series.asset_id}: fewer than 2 arrivals inside window")
    return TickSeries(
        asset_id=series.asset_id,
        times=t[grid_idx],
        prices=series.prices[grid_idx],
        volumes=series.volumes[grid_idx],
    )


def synchronize_to(series: TickSeries, reference_times) -> TickSeries:
    """Observe a series at the given reference times via previous tick.

    The output carries exactly ``reference_times`` as timestamps; each
    price is the last source price at or before the reference time.
    """
    ref = np.asarray(reference_times, dtype=np.float64)
    if ref.size < 1:
        raise ValueError("reference_times must be non-empty")
    if np.any(np.diff(ref) <= 0):
        raise ValueError("reference_times must be strictly increasing")
    t = series.times
    if ref[0] < t[0]:
        raise ValueError(
            f"{series.asset_id}: reference time {ref[0]} precedes first source tick {t[0]}"
        )
    if ref[-1] > t[-1]:
        raise ValueError(
            f"{series.asset_id}: reference time {ref[-1]} beyond last source tick {t[-1]}"
        )
    idx = np.searchsorted(t, ref, side="right") - 1
    return TickSeries(
        asset_id=series.asset_id,
        times=ref,
        prices=series.prices[idx],
        volumes=series.volumes[idx],
    )
