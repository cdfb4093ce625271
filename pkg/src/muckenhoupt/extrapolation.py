"""Extrapolation of weak-type bounds to nearby exponents for flat weights.

Given a bound ``F([W]_{A_p0})`` for an operator on ``L^p0(W)``, valid for
``[W] <= 1 + delta0``, the low case (``p < p0``) and high case (``p > p0``)
build an auxiliary weight ``W`` from a Rubio de Francia majorant and chain
Hölder, the hypothesis and the majorant properties into a bound
``J([w]_{A_p})`` on ``L^p(w)``. :func:`certify` runs the whole chain on
concrete inputs and records every link in a ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .characteristics import a1_characteristic, ap_characteristic
from .exceptions import DomainEscape, DynamicRangeError, EmptyNeighborhood
from .grid import Grid1D, IntervalFamily, Sampled, Weight, as_p, conjugate, dual_weight, lp_norm, same_grid, values_of
from .maximal import MaximalOperator, estimate_operator_norm
from .operators import TestOperator
from .rdf import ROUNDING, Majorant, RdFParams, build_dual_majorant, build_majorant

__all__ = [
    "PowerBound",
    "FlatFormBound",
    "TableBound",
    "parse_bound",
    "Hypothesis",
    "weak_ratio",
    "weak_norm",
    "tlambda_reduction",
    "weak_strong_identity_check",
    "LowCase",
    "HighCase",
    "build_low_case",
    "build_high_case",
    "high_case_exponents",
    "low_characteristic_bound",
    "high_characteristic_bound",
    "j_bound",
    "optimize_epsilon",
    "default_corpus",
    "LedgerEntry",
    "ExtrapolationReport",
    "certify",
    "NormProfile",
    "Neighborhood",
    "neighborhood",
]

LAMBDA_NUDGE = 1e-12
CHAIN_RTOL = 1e-10


# ------------------------------------------------------------- bound functions


@dataclass(frozen=True)
class PowerBound:
    """``c * t**alpha``; ``alpha = 0`` is a constant."""

    c: float
    alpha: float = 0.0

    def __call__(self, t: float) -> float:
        return self.c * t**self.alpha

    def to_dict(self):
        return {"form": "power", "c": self.c, "alpha": self.alpha}


@dataclass(frozen=True)
class FlatFormBound:
    """``c * (1 + a * sqrt(t - 1))``, the shape of the flat-weight maximal bound."""

    c: float
    a: float

    def __call__(self, t: float) -> float:
        return self.c * (1.0 + self.a * math.sqrt(max(t - 1.0, 0.0)))

    def to_dict(self):
        return {"form": "flat", "c": self.c, "a": self.a}


@dataclass(frozen=True)
class TableBound:
    """Piecewise-linear interpolation of sampled ``(t, F(t))`` pairs."""

    ts: tuple
    values: tuple

    def __post_init__(self):
        if len(self.ts) != len(self.values) or len(self.ts) < 2:
            raise ValueError("a table bound needs at least two (t, value) pairs")
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise ValueError("table abscissae must increase strictly")

    def __call__(self, t: float) -> float:
        return float(np.interp(t, self.ts, self.values))

    def to_dict(self):
        return {"form": "table", "ts": list(self.ts), "values": list(self.values)}


def parse_bound(text: str):
    """``const:c``, ``power:c,alpha``, ``flat:c,a`` or ``table:t1=v1;t2=v2;...``."""
    form, _, rest = text.partition(":")
    form = form.strip().lower()
    if form == "table":
        pairs = [item.split("=") for item in rest.split(";") if item.strip()]
        return TableBound(tuple(float(a) for a, _ in pairs), tuple(float(b) for _, b in pairs))
    args = [float(v) for v in rest.split(",") if v.strip()]
    if form == "const" and len(args) == 1:
        return PowerBound(args[0], 0.0)
    if form == "power" and len(args) == 2:
        return PowerBound(*args)
    if form == "flat" and len(args) == 2:
        return FlatFormBound(*args)
    raise ValueError(f"cannot parse bound function {text!r}")


@dataclass(frozen=True)
class Hypothesis:
    """Assumed bound ``||T||_{L^p0(W) -> L^p0,inf(W)} <= F([W]_{A_p0})`` for ``[W] <= 1 + delta0``."""

    p0: float
    F: Callable[[float], float]
    delta0: float

    def __post_init__(self):
        object.__setattr__(self, "p0", as_p(self.p0))
        if self.delta0 <= 0:
            raise ValueError("delta0 must be positive")
        ts = np.linspace(1.0, 1.0 + self.delta0, 101)
        vals = np.array([self.F(t) for t in ts])
        if np.any(vals <= 0):
            raise ValueError("F must be positive")
        if np.any(np.diff(vals) < 0):
            raise ValueError("F must be non-decreasing on [1, 1 + delta0]")

    def bound(self, t: float) -> float:
        if not (1.0 - ROUNDING <= t <= 1.0 + self.delta0):
            raise DomainEscape(
                f"characteristic {t:.6g} lies outside the hypothesis domain [1, {1 + self.delta0:.6g}]: "
                "the weight is not flat enough or p is too far from p0"
            )
        return float(self.F(t))

    def to_dict(self):
        f = self.F.to_dict() if hasattr(self.F, "to_dict") else {"form": "callable"}
        return {"p0": self.p0, "delta0": self.delta0, "F": f}


# ------------------------------------------------------------------ weak type


def _level_grid(tf: np.ndarray) -> np.ndarray:
    levels = np.unique(np.abs(tf))
    levels = levels[levels > 0]
    return levels * (1.0 - LAMBDA_NUDGE)


def tlambda_reduction(T, f, lam: float, tf=None) -> Sampled:
    """``T_lambda f = lambda * 1{|Tf| > lambda}``."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    x = values_of(f)
    tf = T(x) if tf is None else values_of(tf)
    return Sampled(Grid1D(len(x)), np.where(np.abs(tf) > lam, lam, 0.0))


def weak_ratio(tf, f, p, w) -> float:
    """``max_lambda ||T_lambda f||_{L^p(w)} / ||f||_{L^p(w)}`` over the exact level grid."""
    x = values_of(f)
    fn = lp_norm(x, p, w)
    if fn == 0:
        raise ValueError("corpus functions must be nonzero")
    tf = values_of(tf)
    best = 0.0
    for lam in _level_grid(tf):
        best = max(best, lp_norm(np.where(np.abs(tf) > lam, lam, 0.0), p, w) / fn)
    return best


def weak_norm(T, p, w, corpus: Sequence) -> float:
    """Discrete weak ``(p, p)`` norm of ``T`` on ``L^p(w)`` over a corpus."""
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    return max(weak_ratio(T(values_of(f)), f, p, w) for f in corpus)


@dataclass(frozen=True)
class IdentityCheck:
    sup_strong: float
    weak: float
    equal: bool
    per_member: tuple


def weak_strong_identity_check(T, p, w, corpus: Sequence) -> IdentityCheck:
    """``sup_lambda ||T_lambda||`` against the weak norm, member by member."""
    weak = weak_norm(T, p, w, corpus)
    rows = []
    for f in corpus:
        x = values_of(f)
        tf = T(x)
        fn = lp_norm(x, p, w)
        strong = max(
            (lp_norm(tlambda_reduction(T, x, lam, tf), p, w) / fn for lam in _level_grid(tf)),
            default=0.0,
        )
        rows.append((strong, weak_ratio(tf, x, p, w)))
    sup_strong = max(r[0] for r in rows)
    equal = sup_strong == weak and all(a == b for a, b in rows)
    return IdentityCheck(sup_strong, weak, equal, tuple(rows))


# ---------------------------------------------------------- extrapolated weights


@dataclass(frozen=True, eq=False)
class LowCase:
    g: Sampled
    majorant: Majorant
    W: Weight


@dataclass(frozen=True, eq=False)
class HighCase:
    h: Sampled
    majorant: Majorant
    W: Weight


def _as_weight(values, what) -> Weight:
    if not (np.all(np.isfinite(values)) and np.all(values > 0)):
        raise DynamicRangeError(f"{what} is not a strictly positive finite weight")
    return Weight(Grid1D(len(values)), values)


def high_case_exponents(p, p0) -> tuple[float, float]:
    """``q = (p-1)/(p-p0)`` and ``q' = (p-1)/(p0-1)``."""
    p, p0 = as_p(p), as_p(p0)
    if p <= p0:
        raise ValueError("the high case needs p > p0")
    return (p - 1.0) / (p - p0), (p - 1.0) / (p0 - 1.0)


def build_low_case(f, p, p0, w, params=None, op=None, norm=None) -> LowCase:
    """``g = |f| / ||f||_{L^p(w)}`` and ``W = (R_eps g)^(p - p0) w``."""
    p, p0 = as_p(p), as_p(p0)
    if p >= p0:
        raise ValueError("the low case needs p < p0")
    x = np.abs(values_of(f))
    fn = lp_norm(x, p, w)
    if fn == 0:
        raise ValueError("f must be nonzero")
    g = x / fn
    maj = build_majorant(g, p, w, op, params, norm)
    W = _as_weight(maj.values.values ** (p - p0) * values_of(w), "W")
    return LowCase(Sampled(Grid1D(len(g)), g), maj, W)


def build_high_case(h, p, p0, w, params=None, op=None, norm=None) -> HighCase:
    """``W = (R'_eps h)^((p - p0)/(p - 1)) w`` with ``h`` normalized in ``L^p'(w)``."""
    p, p0 = as_p(p), as_p(p0)
    if p <= p0:
        raise ValueError("the high case needs p > p0")
    q = conjugate(p)
    x = values_of(h)
    hn = lp_norm(x, q, w)
    if hn == 0:
        raise ValueError("h must be nonzero")
    x = x / hn
    maj = build_dual_majorant(x, q, w, op, params, norm)
    W = _as_weight(maj.values.values ** ((p - p0) / (p - 1.0)) * values_of(w), "W")
    return HighCase(Sampled(Grid1D(len(x)), x), maj, W)


def low_characteristic_bound(p, p0, epsilon, norm, ap_value) -> float:
    """``(1+eps)^(p0-p) N^(p0-p) [w]_{A_p}``."""
    e = p0 - p
    return (1.0 + epsilon) ** e * norm**e * ap_value


def high_characteristic_bound(p, p0, epsilon, norm, ap_value) -> float:
    """``(1+eps)^s N'^s [w]_{A_p}^((p0-1)/(p-1))`` with ``s = (p-p0)/(p-1)``."""
    s = (p - p0) / (p - 1.0)
    return (1.0 + epsilon) ** s * norm**s * ap_value ** ((p0 - 1.0) / (p - 1.0))


def _evaluate_F(F, t, delta0):
    if isinstance(F, Hypothesis):
        return F.bound(t)
    if delta0 is not None and not (1.0 - ROUNDING <= t <= 1.0 + delta0):
        raise DomainEscape(f"F evaluated at {t:.6g}, outside [1, {1 + delta0:.6g}]")
    return float(F(t))


def j_bound(case: str, p, p0, epsilon, norm, ap_value, F, delta0=None) -> float:
    """Final constant of the low or high chain.

    ``norm`` is ``||M||_{p,w}`` (low) or ``||M||_{L^p'(w^(1-p'))}`` (high).
    A :class:`Hypothesis` passed as ``F`` supplies its own domain.
    """
    if case == "low":
        t = low_characteristic_bound(p, p0, epsilon, norm, ap_value)
        factor = ((1.0 + epsilon) / epsilon) ** ((p0 - p) / p0)
    elif case == "high":
        t = high_characteristic_bound(p, p0, epsilon, norm, ap_value)
        factor = ((1.0 + epsilon) / epsilon) ** ((p - p0) / (p0 * (p - 1.0)))
    else:
        raise ValueError("case must be 'low' or 'high'")
    return factor * _evaluate_F(F, t, delta0)


def optimize_epsilon(case, p, p0, norm, ap_value, F, delta0=None, lo=1e-4, hi=1.0 - 1e-4, tol=1e-9):
    """Golden-section search for the ``eps`` minimizing ``J``; infeasible points count as +inf."""

    best = (math.inf, None)

    def J(eps):
        nonlocal best
        try:
            val = j_bound(case, p, p0, eps, norm, ap_value, F, delta0)
        except DomainEscape:
            val = math.inf
        if val < best[0]:
            best = (val, eps)
        return val

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = J(c), J(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = J(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = J(d)
    J((a + b) / 2.0)
    # the minimum may sit on the feasibility boundary; keep the best finite probe
    val, eps = best
    if eps is None:
        raise DomainEscape("no epsilon in (0, 1) keeps the chain inside the hypothesis domain")
    return eps, val


# ------------------------------------------------------------------ certifier


def default_corpus(n: int, seed: int = 0, size: int = 20) -> list[np.ndarray]:
    """Fixed mix of indicators, spikes, power profiles and random functions."""
    rng = np.random.default_rng(seed)
    k = np.arange(n) + 0.5
    out = [np.ones(n)]
    e = np.zeros(n)
    e[n // 3] = 1.0
    out.append(e)
    ind = np.zeros(n)
    ind[n // 4 : n // 2] = 1.0
    out.append(ind)
    out.append(k ** (-0.4))
    while len(out) < size:
        kind = len(out) % 4
        if kind == 0:
            x = np.exp(rng.normal(scale=1.0, size=n))
        elif kind == 1:
            x = rng.normal(size=n)
        elif kind == 2:
            x = np.zeros(n)
            lo = int(rng.integers(n - 1))
            x[lo : int(rng.integers(lo + 1, n + 1))] = rng.uniform(0.5, 2.0)
        else:
            x = np.maximum(np.abs(k - rng.uniform(0, n)), 0.5) ** (-rng.uniform(0.1, 0.6))
        out.append(x)
    return out[:size]


@dataclass(frozen=True)
class LedgerEntry:
    member: int
    step: str
    lhs: float
    rhs: float
    passed: bool

    def to_dict(self):
        return {"member": self.member, "step": self.step, "lhs": self.lhs, "rhs": self.rhs, "passed": self.passed}


def _entry(member, step, lhs, rhs, rtol=CHAIN_RTOL):
    lhs, rhs = float(lhs), float(rhs)
    return LedgerEntry(member, step, lhs, rhs, bool(lhs <= rhs + rtol * abs(rhs)))


@dataclass(frozen=True, eq=False)
class ExtrapolationReport:
    case: str
    p: float
    p0: float
    epsilon: float
    operator: str
    n: int
    family: str
    hypothesis: dict
    ap_w: float
    norm_estimate: float
    norm_used: float
    safety_used: float
    terms_used: int
    tail_bound: float
    theoretical_bound: float
    measured_W: float
    J: float
    strong_ratio: float
    weak_norm_p: float
    weak_norm_p0_W: float
    ledger: tuple
    W: Weight = field(repr=False)
    majorant_kind: str = "R_eps g"
    bound_label: str = "estimate-based; A_1 step certified a posteriori"

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.ledger)

    def failures(self) -> list[LedgerEntry]:
        return [e for e in self.ledger if not e.passed]

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "p": self.p,
            "p0": self.p0,
            "epsilon": self.epsilon,
            "operator": self.operator,
            "n": self.n,
            "family": self.family,
            "hypothesis": self.hypothesis,
            "ap_w": self.ap_w,
            "norm_estimate": self.norm_estimate,
            "norm_used": self.norm_used,
            "safety_used": self.safety_used,
            "bound_label": self.bound_label,
            "majorant": self.majorant_kind,
            "terms_used": self.terms_used,
            "tail_bound": self.tail_bound,
            "theoretical_bound": self.theoretical_bound,
            "measured_W": self.measured_W,
            "J": self.J,
            "strong_ratio": self.strong_ratio,
            "weak_norm_p": self.weak_norm_p,
            "weak_norm_p0_W": self.weak_norm_p0_W,
            "all_passed": self.all_passed,
            "ledger": [e.to_dict() for e in self.ledger],
        }

    def csv_rows(self) -> list[list]:
        rows = [["member", "step", "lhs", "rhs", "passed"]]
        rows.extend([e.member, e.step, e.lhs, e.rhs, int(e.passed)] for e in self.ledger)
        return rows


def _low_member(i, T, hyp, f, p, w, params, op, norm):
    p0 = hyp.p0
    wv = values_of(w)
    tf = T(f)
    lc = build_low_case(f, p, p0, w, params, op, norm)
    R = lc.majorant.values.values
    g = lc.g.values
    eps = params.epsilon
    N = lc.majorant.norm_used
    a = (1.0 + eps) * N
    ap = ap_characteristic(w, p, op.family).value
    bound = low_characteristic_bound(p, p0, eps, N, ap)
    J = j_bound("low", p, p0, eps, N, ap, hyp)
    W = lc.W
    W_meas = ap_characteristic(W, p0, op.family).value
    F_meas = hyp.bound(W_meas)
    f_norm = lp_norm(f, p, w)
    tf_norm = lp_norm(tf, p, w)
    A = np.sum(np.abs(tf) ** p0 * R ** (p - p0) * wv) / len(wv)
    B = np.sum(R**p * wv) / len(wv)
    pos = g > 0
    entries = [
        _entry(i, "majorant_certificate", np.max(op.values(R) / (a * R + lc.majorant.remainder)), 1.0, ROUNDING),
        _entry(i, "domination", np.max(g - R), 0.0, 0.0),
        _entry(i, "norm_inflation", lp_norm(R, p, w), (1 + eps) / eps * lp_norm(g, p, w) + lc.majorant.tail_bound),
        _entry(i, "a1_bound", a1_characteristic(R, op.family).value, a * (1 + params.cert_slack)),
        _entry(i, "holder_split", tf_norm, A ** (1 / p0) * B ** ((p0 - p) / (p * p0))),
        _entry(i, "W_characteristic", W_meas, bound),
        _entry(i, "W_flat", W_meas, 1.0 + hyp.delta0),
        _entry(i, "substitution", np.max(R[pos] ** (p - p0) / g[pos] ** (p - p0)), 1.0, ROUNDING),
        _entry(i, "hypothesis_strong", lp_norm(tf, p0, W) / lp_norm(f, p0, W), F_meas),
        _entry(i, "hypothesis_weak", weak_ratio(tf, f, p0, W), F_meas),
        _entry(i, "final_strong", tf_norm, J * f_norm),
        _entry(i, "conclusion_weak", weak_ratio(tf, f, p, w), J),
    ]
    return entries, lc, bound, W_meas, J


def _high_member(i, T, hyp, f, p, w, params, op, norm):
    p0 = hyp.p0
    wv = values_of(w)
    q = conjugate(p)
    tf = T(f)
    f_norm = lp_norm(f, p, w)
    tf_norm = lp_norm(tf, p, w)
    eps = params.epsilon
    ap = ap_characteristic(w, p, op.family).value
    if tf_norm == 0:
        J = j_bound("high", p, p0, eps, params.safety * norm, ap, hyp)
        entries = [_entry(i, "final_strong", 0.0, J * f_norm), _entry(i, "conclusion_weak", 0.0, J)]
        return entries, None, None, None, J
    # norming function of Tf in L^p'(w)
    h = np.abs(tf) ** (p - 1.0) / tf_norm ** (p - 1.0)
    hc = build_high_case(h, p, p0, w, params, op, norm)
    h = hc.h.values
    R = hc.majorant.values.values
    N = hc.majorant.norm_used
    a = (1.0 + eps) * N
    bound = high_characteristic_bound(p, p0, eps, N, ap)
    J = j_bound("high", p, p0, eps, N, ap, hyp)
    W = hc.W
    W_meas = ap_characteristic(W, p0, op.family).value
    F_meas = hyp.bound(W_meas)
    ea = (p - p0) / (p0 * (p - 1.0))
    eb = (p0 - 1.0) * p / (p0 * (p - 1.0))
    split = R**ea * h**eb
    n = len(wv)
    pairing = np.sum(np.abs(tf) * h * wv) / n
    s = (p - p0) / (p - 1.0)
    dual_lhs = (np.sum(np.abs(f) ** p0 * R**s * wv) / n) ** (1 / p0)
    pos = h > 0
    entries = [
        _entry(i, "majorant_certificate", np.max((op.values(R * wv) / wv) / (a * R + hc.majorant.remainder)), 1.0, ROUNDING),
        _entry(i, "domination", np.max(h - R), 0.0, 0.0),
        _entry(i, "norm_inflation", lp_norm(R, q, w), (1 + eps) / eps * lp_norm(h, q, w) + hc.majorant.tail_bound),
        _entry(i, "a1_bound", a1_characteristic(R * wv, op.family).value, a * (1 + params.cert_slack)),
        _entry(i, "duality_pairing", pairing, tf_norm * lp_norm(h, q, w)),
        _entry(i, "split_domination", np.max(h[pos] / split[pos]), 1.0, ROUNDING),
        _entry(
            i,
            "holder_split",
            np.sum(np.abs(tf) * split * wv) / n,
            lp_norm(tf, p0, W) * lp_norm(h, q, w) ** (q / conjugate(p0)),
        ),
        _entry(i, "W_characteristic", W_meas, bound),
        _entry(i, "W_flat", W_meas, 1.0 + hyp.delta0),
        _entry(i, "hypothesis_strong", lp_norm(tf, p0, W) / lp_norm(f, p0, W), F_meas),
        _entry(i, "hypothesis_weak", weak_ratio(tf, f, p0, W), F_meas),
        _entry(i, "holder_dual_split", dual_lhs, f_norm * lp_norm(R, q, w) ** (q * (p - p0) / (p * p0))),
        _entry(i, "final_strong", tf_norm, J * f_norm),
        _entry(i, "conclusion_weak", weak_ratio(tf, f, p, w), J),
    ]
    return entries, hc, bound, W_meas, J


def certify(
    T: TestOperator,
    hyp: Hypothesis,
    p,
    w,
    epsilon: float | None = 0.5,
    corpus: Sequence | None = None,
    *,
    op: MaximalOperator | None = None,
    params: RdFParams | None = None,
    delta: float | None = None,
    norm: float | None = None,
) -> ExtrapolationReport:
    """Run the full extrapolation chain for ``T`` at exponent ``p`` and weight ``w``.

    ``epsilon=None`` picks the J-minimizing value by golden-section search.
    ``delta`` is the caller's flatness threshold for ``w``; when given, a
    weight with ``[w]_{A_p} > 1 + delta`` is rejected with DomainEscape.
    ``norm`` overrides the searched maximal-operator norm (the dual one in
    the high case).
    """
    op = op or MaximalOperator()
    params = params or RdFParams()
    p = as_p(p)
    p0 = hyp.p0
    if p == p0:
        raise ValueError("p equals p0: nothing to extrapolate")
    case = "low" if p < p0 else "high"
    n = same_grid(w)
    corpus = default_corpus(n) if corpus is None else [values_of(f) for f in corpus]
    ap = ap_characteristic(w, p, op.family).value
    if delta is not None and ap > 1.0 + delta:
        raise DomainEscape(f"input weight has [w]_A{p:g} = {ap:.6g} > 1 + {delta:g}: not flat enough")
    if norm is None:
        if case == "low":
            norm = estimate_operator_norm(op, p, w, **params.search()).value
        else:
            norm = estimate_operator_norm(op, conjugate(p), dual_weight(w, p), **params.search()).value
    if epsilon is None:
        epsilon, _ = optimize_epsilon(case, p, p0, params.safety * norm, ap, hyp)
    params = replace(params, epsilon=epsilon)
    # fail fast when even the nominal chain leaves the hypothesis domain
    j_bound(case, p, p0, epsilon, params.safety * norm, ap, hyp)

    member = _low_member if case == "low" else _high_member
    ledger, bounds, measured, Js, majorants = [], [], [], [], []
    first_W = None
    for i, f in enumerate(corpus):
        entries, built, bound, W_meas, J = member(i, T, hyp, f, p, w, params, op, norm)
        ledger.extend(entries)
        Js.append(J)
        if built is not None:
            majorants.append(built.majorant)
            bounds.append(bound)
            measured.append(W_meas)
            if first_W is None:
                first_W = built.W
    if first_W is None:
        first_W = Weight(Grid1D(n), values_of(w))

    W_values = [values_of(first_W)]
    strong = max((lp_norm(T(f), p, w) / lp_norm(f, p, w) for f in corpus), default=0.0)
    return ExtrapolationReport(
        case=case,
        p=p,
        p0=p0,
        epsilon=float(epsilon),
        operator=T.name,
        n=n,
        family=op.family.label,
        hypothesis=hyp.to_dict(),
        ap_w=ap,
        norm_estimate=float(norm),
        norm_used=max((m.norm_used for m in majorants), default=params.safety * norm),
        safety_used=max((m.safety for m in majorants), default=params.safety),
        terms_used=max((m.terms_used for m in majorants), default=0),
        tail_bound=max((m.tail_bound for m in majorants), default=0.0),
        theoretical_bound=max(bounds, default=math.nan),
        measured_W=max(measured, default=math.nan),
        J=max(Js),
        strong_ratio=strong,
        weak_norm_p=weak_norm(T, p, w, corpus),
        weak_norm_p0_W=weak_norm(T, p0, W_values[0], corpus),
        ledger=tuple(ledger),
        W=first_W,
        majorant_kind="R_eps g" if case == "low" else "R'_eps h (dual majorant)",
    )


# --------------------------------------------------------------- neighborhood


@dataclass(frozen=True)
class NormProfile:
    """``p -> ||M||_{L^p}`` sampled on a grid, interpolated linearly in log-log."""

    ps: tuple
    values: tuple

    def __post_init__(self):
        if len(self.ps) != len(self.values) or len(self.ps) < 1:
            raise ValueError("profile needs matching, nonempty p and value lists")
        if any(b <= a for a, b in zip(self.ps, self.ps[1:])):
            raise ValueError("profile exponents must increase strictly")
        if self.ps[0] <= 1.0:
            raise ValueError("profile exponents must exceed 1")

    @classmethod
    def measure(cls, ps, n: int = 256, op: MaximalOperator | None = None, **search) -> "NormProfile":
        op = op or MaximalOperator()
        ones = np.ones(n)
        vals = [estimate_operator_norm(op, p, ones, **search).value for p in ps]
        return cls(tuple(float(p) for p in ps), tuple(vals))

    @property
    def p_min(self) -> float:
        return self.ps[0]

    @property
    def p_max(self) -> float:
        return self.ps[-1]

    def __call__(self, p: float) -> float:
        if len(self.ps) == 1:
            return self.values[0]
        return float(np.exp(np.interp(math.log(p), np.log(self.ps), np.log(self.values))))

    def to_dict(self):
        return {"ps": list(self.ps), "values": list(self.values)}


@dataclass(frozen=True)
class Neighborhood:
    p0: float
    p_minus: float
    p_plus: float
    left_capped: bool
    right_capped: bool
    epsilon: float | None

    @property
    def left_arm(self) -> float:
        return self.p0 - self.p_minus

    @property
    def right_arm(self) -> float:
        return self.p_plus - self.p0

    def to_dict(self):
        return {
            "p0": self.p0,
            "p_minus": self.p_minus,
            "p_plus": self.p_plus,
            "left_arm": self.left_arm,
            "right_arm": self.right_arm,
            "left_capped": self.left_capped,
            "right_capped": self.right_capped,
            "epsilon": self.epsilon,
        }


def _bisect(feasible, inside, outside, tol):
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if feasible(mid):
            inside = mid
        else:
            outside = mid
    return inside


def neighborhood(hyp: Hypothesis, delta_in: float, epsilon: float | None, profile: NormProfile, p_ceiling: float = 64.0, tol: float = 1e-10) -> Neighborhood:
    """Exponents around ``p0`` for which the characteristic bounds map
    ``[w] <= 1 + delta_in`` into ``[W] <= 1 + delta0``.

    The unweighted profile stands in for the weighted norms. ``epsilon=None``
    takes the infimum over ``eps`` in (0, 1), i.e. drops the ``(1+eps)``
    factor. Each arm is searched within the range the profile covers; an arm
    that is feasible all the way out is reported as capped.
    """
    if delta_in <= 0:
        raise ValueError("delta_in must be positive")
    if delta_in >= hyp.delta0:
        raise EmptyNeighborhood(
            f"input flatness {delta_in:g} is not below the hypothesis radius {hyp.delta0:g}; "
            "no exponent other than p0 can be reached"
        )
    p0 = hyp.p0
    eps = 0.0 if epsilon is None else float(epsilon)
    top = 1.0 + hyp.delta0
    ap = 1.0 + delta_in

    def low_ok(p):
        return low_characteristic_bound(p, p0, eps, profile(p), ap) <= top

    def high_ok(p):
        return high_characteristic_bound(p, p0, eps, profile(conjugate(p)), ap) <= top

    left_end = max(profile.p_min, 1.0 + 1e-9)
    if left_end >= p0:
        p_minus, left_capped = p0, True
    elif low_ok(left_end):
        p_minus, left_capped = left_end, True
    else:
        p_minus, left_capped = _bisect(low_ok, p0, left_end, tol), False

    right_end = min(conjugate(profile.p_min), p_ceiling)
    if right_end <= p0:
        p_plus, right_capped = p0, True
    elif high_ok(right_end):
        p_plus, right_capped = right_end, True
    else:
        p_plus, right_capped = _bisect(high_ok, p0, right_end, tol), False
    return Neighborhood(p0, p_minus, p_plus, left_capped, right_capped, epsilon)
