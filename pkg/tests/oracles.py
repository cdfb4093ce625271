"""Independent reference implementations used to derive frozen test values.

Everything here is plain Python loops over explicit interval lists, with no
prefix sums and no shared code with the package, so agreement is meaningful.
"""

import itertools
import math

import numpy as np
from scipy.optimize import minimize


def intervals_all(n):
    return [(lo, hi) for lo in range(n) for hi in range(lo, n)]


def avg(x, lo, hi):
    return math.fsum(x[lo : hi + 1]) / (hi - lo + 1)


def ap_brute(w, p, intervals=None):
    w = [float(v) for v in w]
    n = len(w)
    q = p / (p - 1.0)
    sigma = [v ** (1.0 - q) for v in w]
    best = -1.0
    for lo, hi in intervals or intervals_all(n):
        val = avg(w, lo, hi) * avg(sigma, lo, hi) ** (p - 1.0)
        if val > best:
            best = val
    return best


def maximal_brute(x, intervals=None):
    x = [abs(float(v)) for v in x]
    n = len(x)
    out = [0.0] * n
    for lo, hi in intervals or intervals_all(n):
        a = avg(x, lo, hi)
        for i in range(lo, hi + 1):
            if a > out[i]:
                out[i] = a
    return np.array(out)


def a1_brute(w, intervals=None):
    m = maximal_brute(w, intervals)
    return max(m[i] / float(w[i]) for i in range(len(w)))


def step_ap_closed_form(a, b):
    """[w]_{A_2} of a two-level step with equal halves: the whole interval wins."""
    return (a + b) ** 2 / (4.0 * a * b)


def step_a1_closed_form(n, a, b):
    """[w]_{A_1} of step(a, b), b > a: worst point is the last low cell."""
    half = n // 2
    return (a + b * half) / (half + 1) / a


def dyadic_intervals(n):
    out = []
    L = n
    while L >= 1:
        out.extend((s, s + L - 1) for s in range(0, n, L))
        L //= 2
    return out


def maximal_norm_simplex(n, p, m, refine_starts=8, seed=0):
    """Lower bound on ||M||_{L^p} over nonnegative f by a simplex lattice scan plus
    Nelder-Mead refinement of the best lattice points.  For n = 8 this is a
    near-exhaustive search of the normalized cone."""
    pts = []
    for comb in itertools.combinations(range(m + n - 1), n - 1):
        parts, prev = [], -1
        for c in comb:
            parts.append(c - prev - 1)
            prev = c
        parts.append(m + n - 2 - prev)
        pts.append(parts)
    F = np.array(pts, dtype=float) / m
    ivs = intervals_all(n)
    cums = np.concatenate([np.zeros((len(F), 1)), np.cumsum(F, axis=1)], axis=1)
    M = np.zeros_like(F)
    for lo, hi in ivs:
        a = (cums[:, hi + 1] - cums[:, lo]) / (hi - lo + 1)
        M[:, lo : hi + 1] = np.maximum(M[:, lo : hi + 1], a[:, None])
    ratio = (np.sum(M**p, axis=1) / np.sum(F**p, axis=1)) ** (1 / p)

    def neg(z):
        f = z * z
        if not np.any(f > 0):
            return 0.0
        return -(np.sum(maximal_brute(f) ** p) / np.sum(f**p)) ** (1 / p)

    best = float(ratio.max())
    for idx in np.argsort(ratio)[::-1][:refine_starts]:
        res = minimize(neg, np.sqrt(F[idx]), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        best = max(best, -res.fun)
    return best


def ap_enumerate(w, p):
    """All-interval enumeration vectorized per left end, extended precision sums."""
    w = np.asarray(w, dtype=np.longdouble)
    q = p / (p - 1.0)
    sigma = w ** (1.0 - q)
    n = len(w)
    best = -np.inf
    for lo in range(n):
        m = np.arange(1, n - lo + 1, dtype=np.longdouble)
        vals = (np.cumsum(w[lo:]) / m) * (np.cumsum(sigma[lo:]) / m) ** (p - 1.0)
        best = max(best, float(vals.max()))
    return best
