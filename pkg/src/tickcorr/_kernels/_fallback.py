"""Pure NumPy implementations of the hot kernels.

These are the reference implementations; the Cython module `_core`
mirrors them operation-for-operation and is preferred at import time
when it is built. Results agree to <= 1e-12 relative (summation order
differs slightly between the vectorised and scalar loops).
"""

import numpy as np

BACKEND = "python"

# refresh the complex rotation every this many wavenumbers to stop
# rounding drift in the iterated powers
_REFRESH = 512


def mm_coeffs(tau: np.ndarray, delta: np.ndarray, n_coeffs: int) -> np.ndarray:
    """Fourier coefficients c+_k = sum_j exp(i*k*tau_j) * delta_j, k = 1..N.

    Works for arbitrary (non-uniform) tau. Uses iterated complex powers
    instead of an exp per (k, j) pair.
    """
    tau = np.asarray(tau, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    n = tau.shape[0]
    out = np.empty(n_coeffs, dtype=np.complex128)
    if n == 0:
        out[:] = 0.0
        return out
    rot = np.exp(1j * tau)
    acc = delta.astype(np.complex128)
    for k in range(1, n_coeffs + 1):
        if (k - 1) % _REFRESH == 0 and k > 1:
            acc = np.exp(1j * (k * tau)) * delta
        else:
            acc = acc * rot
        out[k - 1] = acc.sum()
    return out


def hy_pair(
    times_i: np.ndarray,
    delta_i: np.ndarray,
    times_j: np.ndarray,
    delta_j: np.ndarray,
) -> float:
    """Hayashi-Yoshida pairwise sum over overlapping return intervals.

    Interval k of an asset is (t_k, t_{k+1}] carrying return delta_k; two
    intervals contribute iff they intersect. Evaluated by an interval
    sweep (searchsorted + prefix sums), never by materialising the
    overlap matrix.
    """
    times_i = np.asarray(times_i, dtype=np.float64)
    times_j = np.asarray(times_j, dtype=np.float64)
    delta_i = np.asarray(delta_i, dtype=np.float64)
    delta_j = np.asarray(delta_j, dtype=np.float64)

    start_j = times_j[:-1]
    end_j = times_j[1:]
    # interval l of j overlaps interval k of i iff
    #   start_j[l] < end_i[k]  and  end_j[l] > start_i[k]
    hi = np.searchsorted(start_j, times_i[1:], side="left")
    lo = np.searchsorted(end_j, times_i[:-1], side="right")
    prefix = np.concatenate(([0.0], np.cumsum(delta_j)))
    return float(np.sum(delta_i * (prefix[hi] - prefix[lo])))


def garch_variance_scan(
    sig2_0: float,
    theta: float,
    w: float,
    lam: float,
    dt: float,
    z: np.ndarray,
    reno: bool,
    floor: float = 1e-12,
) -> tuple[np.ndarray, int]:
    """Euler recursion for the squared-volatility path.

    The Andersen-Bollerslev form diffuses proportionally to sig2, the
    Reno form proportionally to sig. Returns the path (length len(z)+1,
    starting at sig2_0) and the count of floor events.
    """
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = sig2_0
    coeff = np.sqrt(2.0 * lam * theta * dt)
    sig2 = float(sig2_0)
    floored = 0
    for k in range(n):
        if reno:
            shock = coeff * np.sqrt(sig2) * z[k]
        else:
            shock = coeff * sig2 * z[k]
        sig2 = sig2 + theta * (w - sig2) * dt + shock
        if sig2 < floor:
            sig2 = floor
            floored += 1
        out[k + 1] = sig2
    return out, floored
