"""Compiled inner loops. Everything here works on raw float64 arrays."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def compensated_cumsum(x):
    """Neumaier-compensated prefix sums.

    Returns ``(s, c)`` of length ``len(x) + 1`` with the exact prefix sum
    approximated by ``s[i] + c[i]``.
    """
    n = x.shape[0]
    s = np.zeros(n + 1)
    c = np.zeros(n + 1)
    total = 0.0
    comp = 0.0
    for i in range(n):
        v = x[i]
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        s[i + 1] = total
        c[i + 1] = comp
    return s, c


@njit(cache=True, nogil=True)
def maximal_all_intervals(x):
    # For every left end lo: averages over all right ends, then a reverse
    # running max keeps only the best right end >= each point.
    n = x.shape[0]
    out = np.full(n, -np.inf)
    best = np.empty(n)
    for lo in range(n):
        acc = 0.0
        for hi in range(lo, n):
            acc += x[hi]
            best[hi] = acc / (hi - lo + 1)
        run = -np.inf
        for hi in range(n - 1, lo - 1, -1):
            if best[hi] > run:
                run = best[hi]
            if run > out[hi]:
                out[hi] = run
    return out


@njit(cache=True, nogil=True)
def ap_scan_all_intervals(w, d, p):
    """Max over all intervals of avg(w) * avg(d)**(p - 1).

    Sums run from each left end with Neumaier compensation rather than as
    prefix differences, so tiny intervals next to huge ones keep full
    relative accuracy. Returns ``(value, lo, hi, min_product)``; ties keep
    the smallest ``lo`` and then the smallest ``hi``.
    """
    n = w.shape[0]
    best = -np.inf
    best_lo = 0
    best_hi = 0
    worst = np.inf
    q = p - 1.0
    for lo in range(n):
        sw = 0.0
        cw = 0.0
        sd = 0.0
        cd = 0.0
        for hi in range(lo, n):
            v = w[hi]
            t = sw + v
            if abs(sw) >= abs(v):
                cw += (sw - t) + v
            else:
                cw += (v - t) + sw
            sw = t
            v = d[hi]
            t = sd + v
            if abs(sd) >= abs(v):
                cd += (sd - t) + v
            else:
                cd += (v - t) + sd
            sd = t
            m = hi - lo + 1
            val = ((sw + cw) / m) * ((sd + cd) / m) ** q
            if val > best:
                best = val
                best_lo = lo
                best_hi = hi
            if val < worst:
                worst = val
    return best, best_lo, best_hi, worst
