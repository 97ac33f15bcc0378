"""Shared fixtures and brute-force oracles.

The oracles evaluate the defining sums directly (double loops, literal
share expansion) and stay independent of the optimised code paths they
check.
"""

import numpy as np
import pytest

from tickcorr.core import PathBundle, TickSeries


def mm_brute_double_sum(tau1, d1, tau2, d2, n_coeffs):
    """Direct double-sum Fourier covariance over wavenumbers 1..N:
    (1/N) sum_k sum_j sum_l cos(k (tau1_j - tau2_l)) d1_j d2_l."""
    total = 0.0
    for k in range(1, n_coeffs + 1):
        for tj, dj in zip(tau1, d1):
            for tl, dl in zip(tau2, d2):
                total += np.cos(k * (tj - tl)) * dj * dl
    return total / n_coeffs


def mm_brute_fast(tau1, d1, tau2, d2, n_coeffs):
    """Same direct double sum as ``mm_brute_double_sum``, evaluated with
    the cosine of the outer time-difference matrix (usable at n ~ 50)."""
    diff = np.subtract.outer(np.asarray(tau1), np.asarray(tau2))
    outer = np.outer(d1, d2)
    total = 0.0
    for k in range(1, n_coeffs + 1):
        total += float(np.sum(np.cos(k * diff) * outer))
    return total / n_coeffs


def eq2_literal_sum(tau1, d1, tau2, d2, n_coeffs):
    """The literal |s| <= N double sum with its 1/(2N+1) prefactor,
    k = 0 term included."""
    total = 0.0
    for s in range(-n_coeffs, n_coeffs + 1):
        for tj, dj in zip(tau1, d1):
            for tl, dl in zip(tau2, d2):
                total += np.real(np.exp(1j * s * (tj - tl))) * dj * dl
    return total / (2 * n_coeffs + 1)


def c_minus_brute(tau, delta, n_coeffs):
    """Direct evaluation of c-_k = sum_j exp(-i k tau_j) delta_j."""
    return np.array(
        [np.sum(np.exp(-1j * k * np.asarray(tau)) * np.asarray(delta)) for k in range(1, n_coeffs + 1)]
    )


def hy_brute(times1, d1, times2, d2):
    """Naive double loop over interval pairs with the overlap test."""
    total = 0.0
    for k in range(len(d1)):
        for l in range(len(d2)):
            if times1[k] < times2[l + 1] and times2[l] < times1[k + 1]:
                total += d1[k] * d2[l]
    return total


def expand_shares(prices, volumes):
    """Literal share expansion: each price repeated once per share."""
    return np.repeat(np.asarray(prices, dtype=np.float64), np.asarray(volumes, dtype=np.int64))


def intrinsic_oracle(prices, volumes, bucket):
    """Bucket means over the literally expanded stream, trailing partial
    bucket dropped."""
    shares = expand_shares(prices, volumes)
    n_buckets = len(shares) // bucket
    return np.array([shares[i * bucket : (i + 1) * bucket].mean() for i in range(n_buckets)])


def sync_volume_oracle(events, asset_ids, bucket):
    """Literal-expansion trace of the synchronised volume clock.

    ``events``: list of (time, asset, price, volume). Returns
    (stamps, {asset: prices-with-NaN}).
    """
    queues = {a: [] for a in asset_ids}
    prices = {a: [] for a in asset_ids}
    stamps = []
    for t in sorted({e[0] for e in events}):
        for time, asset, price, volume in events:
            if time == t:
                queues[asset].extend([price] * int(volume))
        while any(len(q) >= bucket for q in queues.values()):
            stamps.append(t)
            for a in asset_ids:
                if len(queues[a]) >= bucket:
                    take = queues[a][:bucket]
                    del queues[a][:bucket]
                    prices[a].append(float(np.mean(take)))
                else:
                    prices[a].append(np.nan)
    return stamps, prices


def random_tick_series(rng, n, asset_id="X", scale=1e-3, integer_times=False):
    """A small random tick series with strictly increasing times."""
    if integer_times:
        times = np.sort(rng.choice(np.arange(4 * n), size=n, replace=False)).astype(float)
    else:
        times = np.cumsum(rng.uniform(0.1, 2.0, size=n))
    log_prices = np.cumsum(rng.normal(0.0, scale, size=n))
    return TickSeries(asset_id=asset_id, times=times, prices=100.0 * np.exp(log_prices))


def pair_bundle(s1, s2):
    return PathBundle.from_series([s1, s2])


@pytest.fixture
def rng():
    return np.random.default_rng(20240803)
