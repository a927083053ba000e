"""Bessel function J0 and a bracketing root finder."""
import math

import numpy as np

J0_RANGE = 50.0
_SERIES_CUTOFF = 8.0
_SERIES_TERMS = 60


def _j0_series(x: float) -> float:
    # sum_k (-x^2/4)^k / (k!)^2, evaluated term by term
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, _SERIES_TERMS):
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-17 * abs(total) and k > 5:
            break
    return total


def _j0_miller(x: float) -> float:
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalized by
    # J_0 + 2 sum_k J_{2k} = 1
    start = 2 * ((int(1.5 * abs(x)) + 40) // 2)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    for n in range(start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
    norm += j_cur
    return j_cur / norm


def _j0_scalar(x: float) -> float:
    x = abs(float(x))
    if not math.isfinite(x) or x >= J0_RANGE:
        raise ValueError(f"bessel_j0 supports |x| < {J0_RANGE}, got {x}")
    if x < _SERIES_CUTOFF:
        return _j0_series(x)
    return _j0_miller(x)


def bessel_j0(x):
    """Zeroth-order Bessel function of the first kind for |x| < 50."""
    if np.ndim(x) == 0:
        return _j0_scalar(x)
    arr = np.asarray(x, dtype=float)
    return np.array([_j0_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


def bisect_root(f, lo: float, hi: float, tol: float = 1e-10, widen: float = 0.1, max_widen: int = 50) -> float:
    """Root of ``f`` by bisection, widening [lo, hi] until the sign changes."""
    flo, fhi = f(lo), f(hi)
    tries = 0
    while flo * fhi > 0:
        if tries >= max_widen:
            raise ValueError(f"root not bracketed in [{lo}, {hi}]")
        lo, hi = lo - widen, hi + widen
        flo, fhi = f(lo), f(hi)
        tries += 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)
