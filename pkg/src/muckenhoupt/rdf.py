"""Rubio de Francia majorants as certified truncated Neumann series.

``R g = sum_{k<=K} M^k g / ((1+eps) N)^k`` where ``N`` is a searched lower
estimate of the operator norm times a safety factor. A lower estimate
cannot justify the norm bound on its own, so every construction is
checked after the fact:

* pointwise, ``M(Rg) <= (1+eps) N Rg + rho`` with ``rho = M^{K+1} g / ((1+eps) N)^K``
  the truncation remainder;
* along the orbit, ``||M^k g|| <= N^k ||g||`` for every computed term.

A failed check doubles the safety factor and rebuilds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import a1_characteristic
from .exceptions import CertificateFailure, NonNegativityViolation
from .grid import Grid1D, Sampled, as_p, conjugate, dual_weight, lp_norm, same_grid, values_of
from .maximal import MaximalOperator, estimate_operator_norm

__all__ = [
    "RdFParams",
    "Majorant",
    "A1Check",
    "build_majorant",
    "build_dual_majorant",
    "a1_properties",
    "terms_needed",
]

ROUNDING = 1e-12


@dataclass(frozen=True)
class RdFParams:
    epsilon: float = 0.5
    tail_tol: float | None = None  # None: 1e-9 * ||g||
    max_terms: int = 100_000
    safety: float = 1.0
    max_retries: int = 3
    cert_slack: float = 1e-6
    strategy: str = "coordinate_ascent"
    budget: int = 1500
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.tail_tol is not None and self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")
        if self.safety < 1.0:
            raise ValueError("safety must be >= 1")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")

    def search(self) -> dict:
        return {"strategy": self.strategy, "budget": self.budget, "seed": self.seed, "threads": self.threads}


@dataclass(frozen=True, eq=False)
class Majorant:
    values: Sampled
    terms_used: int
    norm_used: float
    tail_bound: float
    dual: bool
    epsilon: float
    norm_estimate: float
    safety: float
    retries: int
    remainder: np.ndarray = field(repr=False)
    term_norms: tuple = field(repr=False)

    def sidecar(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "terms_used": self.terms_used,
            "norm_used": self.norm_used,
            "tail_bound": self.tail_bound,
            "dual": self.dual,
        }


def terms_needed(epsilon: float, g_norm: float, tail_tol: float, max_terms: int) -> int:
    """Least ``K >= 1`` with ``(1+eps)^-(K-1) / eps * ||g|| <= tail_tol``, capped."""
    ratio = g_norm / (epsilon * tail_tol)
    k = 1 if ratio <= 1 else 1 + math.ceil(math.log(ratio) / math.log1p(epsilon))
    return min(k, max_terms)


def _check_source(g):
    x = values_of(g)
    if np.any(x < 0):
        raise NonNegativityViolation("majorant source must be nonnegative")
    if not np.any(x > 0):
        raise NonNegativityViolation("majorant source is identically zero")
    return x


def _pow(x: float, k: int) -> float:
    try:
        return x**k
    except OverflowError:
        return math.inf


def _series(apply, g, a, K):
    total = g.copy()
    t = g
    scale = 1.0
    terms = [g]
    for k in range(1, K + 1):
        nxt = apply(t)
        scale /= a
        if np.array_equal(nxt, t):
            # fixed point: the remaining terms are a geometric tail of t
            r = 1.0 / a
            total += t * (scale * (1.0 - r ** (K - k + 1)) / (1.0 - r))
            return total, t * (scale * r ** (K - k)), terms, K
        total += nxt * scale
        t = nxt
        terms.append(t)
    # scale is a^-K here; a^K itself may overflow
    return total, apply(t) * scale, terms, K


def _build(apply, g, q, mu, norm_estimate, params, dual):
    g_norm = lp_norm(g, q, mu)
    tol = params.tail_tol if params.tail_tol is not None else 1e-9 * g_norm
    eps = params.epsilon
    K = terms_needed(eps, g_norm, tol, params.max_terms)
    tail = (1.0 + eps) ** (-(K - 1)) / eps * g_norm
    if tail > tol:
        raise CertificateFailure(f"max_terms={params.max_terms} cannot reach tail_tol={tol:.3g}")
    safety = params.safety
    for attempt in range(params.max_retries + 1):
        N = safety * norm_estimate
        a = (1.0 + eps) * N
        values, rho, terms, _ = _series(apply, g, a, K)
        lhs = apply(values)
        pointwise = bool(np.all(lhs <= (a * values + rho) * (1.0 + ROUNDING)))
        norms = [lp_norm(t, q, mu) for t in terms]
        envelope = all(nk <= _pow(N, k) * g_norm * (1.0 + ROUNDING) for k, nk in enumerate(norms))
        if pointwise and envelope:
            return Majorant(
                Sampled(Grid1D(len(g)), values),
                K,
                N,
                tail,
                dual,
                eps,
                norm_estimate,
                safety,
                attempt,
                rho,
                tuple(norms),
            )
        last = safety
        safety *= 2.0
        if pointwise:
            # Each ratio ||M^k g|| / ||M^(k-1) g|| is itself a lower bound on the
            # norm, and the iterates do not depend on N: raising N to the largest
            # ratio makes the envelope hold by telescoping.
            witnessed = max(cur / prev for prev, cur in zip(norms, norms[1:]))
            needed = witnessed * (1.0 + ROUNDING) / norm_estimate
            if needed > last:
                safety = needed
    raise CertificateFailure(
        f"majorant certificate failed after {params.max_retries} retries (safety reached {last:g}); "
        "the norm estimate is too low"
    )


def build_majorant(g, p, w, op: MaximalOperator | None = None, params: RdFParams | None = None, norm: float | None = None) -> Majorant:
    """``R_eps g`` on ``L^p(w)``. ``norm`` overrides the searched estimate of ``||M||_{p,w}``."""
    op = op or MaximalOperator()
    params = params or RdFParams()
    p = as_p(p)
    x = _check_source(g)
    same_grid(x, w)
    if norm is None:
        norm = estimate_operator_norm(op, p, w, **params.search()).value
    return _build(op.values, x, p, values_of(w), norm, params, dual=False)


def build_dual_majorant(h, q, w, op: MaximalOperator | None = None, params: RdFParams | None = None, norm: float | None = None) -> Majorant:
    """``R'_eps h`` on ``L^q(w)`` built from ``M'h = M(hw)/w``.

    ``q`` is the exponent of the space (the conjugate of the primal ``p``).
    The norm of ``M'`` on ``L^q(w)`` equals that of ``M`` on ``L^q(w^(1-q))``,
    which is what gets searched when ``norm`` is not supplied.
    """
    op = op or MaximalOperator()
    params = params or RdFParams()
    q = as_p(q)
    x = _check_source(h)
    wv = values_of(w)
    same_grid(x, wv)
    if norm is None:
        sigma = dual_weight(wv, conjugate(q))
        norm = estimate_operator_norm(op, q, sigma, **params.search()).value

    def apply(v):
        return op.values(v * wv) / wv

    return _build(apply, x, q, wv, norm, params, dual=True)


@dataclass(frozen=True)
class A1Check:
    a1_value: float
    bound: float
    holds: bool


def a1_properties(maj: Majorant, w=None, params: RdFParams | None = None, op: MaximalOperator | None = None) -> A1Check:
    """``[R]_{A_1}`` (or ``[R' w]_{A_1}`` for a dual majorant) against ``(1+eps) N``."""
    slack = (params or RdFParams()).cert_slack
    family = (op or MaximalOperator()).family
    target = maj.values.values
    if maj.dual:
        if w is None:
            raise ValueError("a dual majorant needs its weight")
        target = target * values_of(w)
    a1 = a1_characteristic(target, family).value
    bound = (1.0 + maj.epsilon) * maj.norm_used
    return A1Check(a1, bound, a1 <= bound * (1.0 + slack))
