"""A_p and A_1 characteristics over an interval family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import ap_scan_all_intervals
from .exceptions import DynamicRangeError
from .grid import Interval, IntervalFamily, PrefixSums, as_p, conjugate, dual_weight, values_of
from .maximal import MaximalOperator

__all__ = [
    "CharacteristicReport",
    "DualityCheck",
    "ap_characteristic",
    "ap_interval_products",
    "a1_characteristic",
    "is_flat",
    "duality_identity_check",
]

# Discrete Hölder puts every interval product at >= 1; this is the rounding allowance.
HOLDER_SLACK = 1e-12


@dataclass(frozen=True)
class CharacteristicReport:
    value: float
    argmax_interval: Interval
    family: IntervalFamily
    p: float | None = None
    min_product: float | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "lo": self.argmax_interval.lo,
            "hi": self.argmax_interval.hi,
            "family": self.family.label,
            "p": self.p,
        }


def _dual_values(w, p):
    try:
        return dual_weight(w, p).values
    except ValueError as exc:  # Weight() rejects underflow to zero
        raise DynamicRangeError(str(exc)) from None


def ap_interval_products(w, p, family: IntervalFamily | None = None):
    """``(lo, hi, products)`` for every member of the family, in family order."""
    family = family or IntervalFamily()
    p = as_p(p)
    x = values_of(w)
    lo, hi = family.intervals(len(x))
    avg_w = PrefixSums(x).average(lo, hi)
    avg_d = PrefixSums(_dual_values(x, p)).average(lo, hi)
    return lo, hi, avg_w * avg_d ** (p - 1.0)


def ap_characteristic(w, p, family: IntervalFamily | None = None) -> CharacteristicReport:
    """``max_I avg_I(w) * avg_I(w^(1-p'))^(p-1)`` over the family."""
    family = family or IntervalFamily()
    p = as_p(p)
    x = values_of(w)
    if family.kind == "all":
        value, lo, hi, worst = ap_scan_all_intervals(np.ascontiguousarray(x), _dual_values(x, p), p)
    else:
        los, his, prods = ap_interval_products(x, p, family)
        i = int(np.argmax(prods))  # family order is (lo, hi) sorted, argmax takes the first
        value, lo, hi, worst = prods[i], los[i], his[i], prods.min()
    if not np.isfinite(value):
        raise DynamicRangeError(f"A_{p} characteristic overflowed")
    return CharacteristicReport(float(value), Interval(int(lo), int(hi)), family, p, float(worst))


def a1_characteristic(w, family: IntervalFamily | None = None) -> CharacteristicReport:
    """Least ``c`` with ``Mw <= c w`` pointwise."""
    family = family or IntervalFamily()
    x = values_of(w)
    mw = MaximalOperator(family).values(x)
    ratio = mw / x
    k = int(np.argmax(ratio))
    lo, hi = family.intervals(len(x))
    hit = (lo <= k) & (hi >= k)
    avgs = PrefixSums(x).average(lo[hit], hi[hit])
    j = int(np.argmax(avgs))
    return CharacteristicReport(float(ratio[k]), Interval(int(lo[hit][j]), int(hi[hit][j])), family)


def is_flat(w, p, delta: float, family: IntervalFamily | None = None) -> bool:
    """True when ``[w]_{A_p} <= 1 + delta``. The threshold is always the caller's."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return ap_characteristic(w, p, family).value <= 1.0 + delta


@dataclass(frozen=True)
class DualityCheck:
    lhs: float
    rhs: float
    max_abs_rel_err: float


def duality_identity_check(w, p, family: IntervalFamily | None = None) -> DualityCheck:
    """Compare ``[w^(1-p')]_{A_p'}`` with ``[w]_{A_p}^(p'-1)``, interval by interval."""
    family = family or IntervalFamily()
    p = as_p(p)
    q = conjugate(p)
    sigma = dual_weight(w, p)
    lhs = ap_characteristic(sigma, q, family).value
    rhs = ap_characteristic(w, p, family).value ** (q - 1.0)
    _, _, per_dual = ap_interval_products(sigma, q, family)
    _, _, per_primal = ap_interval_products(w, p, family)
    per_primal = per_primal ** (q - 1.0)
    err = float(np.max(np.abs(per_dual - per_primal) / per_primal))
    return DualityCheck(lhs, rhs, err)
