"""Covariance estimators for asynchronous tick data.

Two estimators are provided: the Fourier (Malliavin-Mancino style)
estimator, which works in the frequency domain after rescaling event
times onto [0, 2*pi], and the overlap (Hayashi-Yoshida style) estimator,
which sums products of returns over intersecting trade intervals. A
synchronous realized-covariance oracle and the analytical correlation
decay curve complete the set.

Conventions
-----------
The Fourier estimator uses the positive wavenumber set K = {1..N} with

    Sigma_ij = (1/N) * sum_k Re[ c+_k(i) * c-_k(j) ],

which for real returns is symmetric in (i, j) by construction. The k = 0
term (an outer product of total returns) is excluded; it cancels in the
correlation. Sigma is reported on the [0, 2*pi] time scale; correlations
are invariant to that choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    TWO_PI,
    CovarianceResult,
    PathBundle,
    RescaledTimes,
    correlation_from_sigma,
    log_returns,
    rescale_times,
)

# an integer event grid at least this fine-grained relative to machine
# precision lets the coefficient sums be regrouped as a zero-padded FFT
_GRID_ATOL = 1e-9
_FFT_MAX_LEN = 1 << 26


@dataclass(frozen=True)
class FourierCoefficients:
    """Per-asset Fourier coefficients of the return process, k = 1..N.

    For real returns c-_k is the complex conjugate of c+_k; both views
    are kept because the covariance contraction is written in terms of
    the pair.
    """

    c_plus: tuple[np.ndarray, ...]
    c_minus: tuple[np.ndarray, ...]
    n_coeffs: int

    @classmethod
    def from_c_plus(cls, c_plus, n_coeffs: int) -> "FourierCoefficients":
        c_plus = tuple(np.asarray(c) for c in c_plus)
        return cls(c_plus=c_plus, c_minus=tuple(np.conj(c) for c in c_plus), n_coeffs=n_coeffs)


@dataclass(frozen=True)
class KanataniWeights:
    """0/1 overlap matrix between the return intervals of two assets."""

    w: np.ndarray


def nyquist_cutoff(rescaled: RescaledTimes) -> int:
    """Largest alias-free wavenumber given the finest event spacing.

    N = floor(pi / dtau_min) where dtau_min is the smallest strictly
    positive gap between consecutive rescaled event times over all
    assets.
    """
    gap_min = np.inf
    for tau in rescaled.tau:
        gaps = np.diff(tau)
        gaps = gaps[gaps > 0]
        if gaps.size:
            gap_min = min(gap_min, float(gaps.min()))
    if not np.isfinite(gap_min):
        raise ValueError("no frequency content: all event times identical")
    # nudge guards float noise when pi/gap lands on an integer
    ratio = np.pi / gap_min
    return max(1, int(np.floor(ratio + 1e-9 * max(1.0, ratio))))


def _integer_grid(times: np.ndarray, t_min: float, span: float) -> np.ndarray | None:
    """Offsets on the unit-second grid, or None if the series is off-grid."""
    u = times - t_min
    r = np.rint(u)
    if np.max(np.abs(u - r)) <= _GRID_ATOL * max(1.0, span):
        return r.astype(np.int64)
    return None


def _coeffs_fft(offsets: np.ndarray, delta: np.ndarray, m: int, n_coeffs: int) -> np.ndarray:
    """c+_k via a zero-padded FFT when events sit on an integer grid.

    With tau_j = 2*pi*u_j/m the coefficient sum is a sparse DFT of the
    returns scattered onto the grid; exact regrouping of the same sum.
    """
    grid = np.zeros(m, dtype=np.float64)
    np.add.at(grid, offsets % m, delta)
    if n_coeffs <= m // 2:
        return np.conj(np.fft.rfft(grid)[1 : n_coeffs + 1])
    # user-supplied cutoff beyond the grid Nyquist: indices alias mod m
    spectrum = np.fft.fft(grid)
    return np.conj(spectrum[np.arange(1, n_coeffs + 1) % m])


def mm_fourier_coefficients(bundle: PathBundle, n_coeffs: int) -> FourierCoefficients:
    """Fourier coefficients of every asset's return process, k = 1..N.

    Dispatches per asset: events on a common integer-second grid go
    through an exact FFT regrouping; anything else hits the O(N*n)
    kernel (compiled when available).
    """
    t_min, t_max = bundle.window
    span = t_max - t_min
    if span <= 0:
        raise ValueError("zero-length window")
    rescaled = rescale_times(bundle)
    m = int(np.rint(span))
    on_grid = abs(span - m) <= _GRID_ATOL * max(1.0, span) and 1 < m <= _FFT_MAX_LEN

    c_plus = []
    for series, tau in zip(bundle.series, rescaled.tau):
        delta = log_returns(series)
        if not np.any(delta != 0.0):
            raise ValueError(f"{series.asset_id}: zero total variation")
        offsets = _integer_grid(series.times[:-1], t_min, span) if on_grid else None
        if offsets is not None and m * int(np.log2(m) + 1) < n_coeffs * delta.size:
            c_plus.append(_coeffs_fft(offsets, delta, m, n_coeffs))
        else:
            c_plus.append(_kernels.mm_coeffs(tau[:-1], delta, n_coeffs))
    return FourierCoefficients.from_c_plus(c_plus, n_coeffs)


def mm_sigma_from_coefficients(coeffs: FourierCoefficients, n_coeffs: int | None = None) -> np.ndarray:
    """Contract coefficients into the integrated covariance matrix.

    ``n_coeffs`` may truncate to a smaller wavenumber set than was
    computed, which lets one coefficient pass serve a whole cutoff grid.
    """
    n = coeffs.n_coeffs if n_coeffs is None else int(n_coeffs)
    if n < 1 or n > coeffs.n_coeffs:
        raise ValueError(f"cutoff {n} outside computed range 1..{coeffs.n_coeffs}")
    m = len(coeffs.c_plus)
    sigma = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        ci = coeffs.c_plus[i][:n]
        for j in range(i, m):
            cj = coeffs.c_minus[j][:n]
            sigma[i, j] = sigma[j, i] = np.real(ci * cj).sum() / n
    return sigma


def mm_covariance(bundle: PathBundle, cutoff: int | None = None) -> CovarianceResult:
    """Fourier covariance estimate of a bundle of tick series.

    Parameters
    ----------
    bundle : PathBundle
        At least two series, each with >= 2 ticks and strictly
        increasing times (deduplicate upstream).
    cutoff : int, optional
        Number of Fourier coefficients N. Defaults to the Nyquist
        cutoff implied by the finest event spacing.

    Returns
    -------
    CovarianceResult
        Integrated covariance on the [0, 2*pi] scale, correlations, and
        the cutoff used.
    """
    if len(bundle) < 2:
        raise ValueError("covariance needs at least 2 series")
    if cutoff is None:
        cutoff = nyquist_cutoff(rescale_times(bundle))
    coeffs = mm_fourier_coefficients(bundle, cutoff)
    sigma = mm_sigma_from_coefficients(coeffs)
    rho, out_of_range = correlation_from_sigma(sigma)
    return CovarianceResult(
        sigma=sigma,
        rho=rho,
        estimator_tag="MM",
        asset_ids=tuple(bundle.asset_ids),
        cutoff_used=int(cutoff),
        rho_out_of_range=out_of_range,
    )


def kanatani_weights(times_i: np.ndarray, times_j: np.ndarray) -> KanataniWeights:
    """Overlap indicators between the return intervals of two tick grids.

    Entry (k, l) is 1 iff (t_k, t_{k+1}] of the first grid intersects
    (t_l, t_{l+1}] of the second. Materialises the full matrix; for
    large grids use the streaming evaluation inside ``hy_covariance``.
    """
    times_i = np.asarray(times_i, dtype=np.float64)
    times_j = np.asarray(times_j, dtype=np.float64)
    for name, t in (("times_i", times_i), ("times_j", times_j)):
        if t.size < 2:
            raise ValueError(f"{name}: need at least 2 entries")
        if np.any(np.diff(t) <= 0):
            raise ValueError(f"{name}: times must be strictly increasing")
    start_i, end_i = times_i[:-1, None], times_i[1:, None]
    start_j, end_j = times_j[None, :-1], times_j[None, 1:]
    w = ((start_i < end_j) & (start_j < end_i)).astype(np.int8)
    return KanataniWeights(w=w)


def hy_covariance(bundle: PathBundle) -> CovarianceResult:
    """Overlap-interval covariance estimate of a bundle of tick series.

    Off-diagonal entries sum return products over intersecting
    intervals via an interval sweep; the diagonal is each series'
    realized variance (an interval trivially overlaps itself only).
    """
    if len(bundle) < 2:
        raise ValueError("covariance needs at least 2 series")
    deltas, times = [], []
    for series in bundle.series:
        d = log_returns(series)
        if not np.any(d != 0.0):
            raise ValueError(f"{series.asset_id}: zero total variation")
        deltas.append(d)
        times.append(series.times)
    m = len(bundle)
    sigma = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        sigma[i, i] = float(np.sum(deltas[i] * deltas[i]))
        for j in range(i + 1, m):
            sigma[i, j] = sigma[j, i] = _kernels.hy_pair(times[i], deltas[i], times[j], deltas[j])
    rho, out_of_range = correlation_from_sigma(sigma)
    return CovarianceResult(
        sigma=sigma,
        rho=rho,
        estimator_tag="HY",
        asset_ids=tuple(bundle.asset_ids),
        rho_out_of_range=out_of_range,
    )


def realized_covariance(bundle: PathBundle) -> CovarianceResult:
    """Synchronous realized covariance: Sigma_ij = sum_k d_i(k) d_j(k).

    Requires all series to share identical time stamps; serves as the
    oracle for the overlap estimator's synchronous limit.
    """
    if len(bundle) < 2:
        raise ValueError("covariance needs at least 2 series")
    ref = bundle.series[0].times
    for s in bundle.series[1:]:
        if len(s.times) != len(ref) or not np.array_equal(s.times, ref):
            raise ValueError(f"{s.asset_id}: non-synchronous input")
    returns = np.column_stack([log_returns(s) for s in bundle.series])
    sigma = returns.T @ returns
    rho, out_of_range = correlation_from_sigma(sigma)
    return CovarianceResult(
        sigma=sigma,
        rho=rho,
        estimator_tag="RV",
        asset_ids=tuple(bundle.asset_ids),
        rho_out_of_range=out_of_range,
    )


def epps_theory_curve(c: float, lam: float, dt) -> np.ndarray | float:
    """Correlation attenuation from asynchrony as a function of the
    sampling interval: c * (1 + (exp(-lam*dt) - 1) / (lam*dt)).

    ``c`` is the asymptotic (long-interval) correlation and ``lam`` the
    mean arrival intensity of the slower asset per second.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    dt_arr = np.asarray(dt, dtype=np.float64)
    if np.any(dt_arr <= 0):
        raise ValueError("dt must be positive")
    x = lam * dt_arr
    out = c * (1.0 + np.expm1(-x) / x)
    return float(out) if np.isscalar(dt) else out
