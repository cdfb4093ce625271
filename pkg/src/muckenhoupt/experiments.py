"""Trend experiments on the discrete model: plot-ready tables plus checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extrapolation import Hypothesis, NormProfile, PowerBound, j_bound, neighborhood, optimize_epsilon
from .grid import IntervalFamily
from .maximal import MaximalOperator, estimate_operator_norm

__all__ = ["ExperimentResult", "norm_vs_p", "neighborhood_vs_p0", "eps_tradeoff", "EXPERIMENTS", "DEFAULT_PROFILE_PS"]

DEFAULT_PROFILE_PS = (1.1, 1.2, 1.35, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0)


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    columns: tuple
    rows: tuple
    assertions: dict
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def csv_rows(self) -> list:
        return [list(self.columns)] + [list(r) for r in self.rows]

    def summary(self) -> dict:
        return {"experiment": self.name, "params": self.params, "assertions": self.assertions, "passed": self.passed}


def _non_increasing(xs, rtol=0.0):
    return all(b <= a * (1 + rtol) for a, b in zip(xs, xs[1:]))


def norm_vs_p(ps=(2.0, 4.0, 8.0, 16.0), n=512, family="all", strategy="coordinate_ascent", budget=1500, seed=0, threads=1):
    """Unweighted maximal-operator norm estimates as p grows."""
    op = MaximalOperator(IntervalFamily.parse(family))
    ones = np.ones(n)
    rows = []
    for p in ps:
        est = estimate_operator_norm(op, p, ones, strategy=strategy, budget=budget, seed=seed, threads=threads)
        rows.append((float(p), est.value))
    values = [r[1] for r in rows]
    assertions = {"non_increasing": _non_increasing(values), "final_at_most_1.2": values[-1] <= 1.2}
    params = {"ps": list(ps), "n": n, "family": family, "strategy": strategy, "budget": budget, "seed": seed}
    return ExperimentResult("norm-vs-p", ("p", "norm_estimate"), tuple(rows), assertions, params)


def neighborhood_vs_p0(
    p0s=(2.0, 4.0, 8.0),
    delta_in=0.02,
    delta0=0.2,
    epsilon=0.5,
    n=256,
    profile: NormProfile | None = None,
    budget=1500,
    seed=0,
):
    """Neighborhood arms for several p0 from a measured unweighted norm profile."""
    if profile is None:
        profile = NormProfile.measure(DEFAULT_PROFILE_PS, n=n, budget=budget, seed=seed)
    rows = []
    for p0 in p0s:
        nb = neighborhood(Hypothesis(p0, PowerBound(1.0), delta0), delta_in, epsilon, profile)
        rows.append((float(p0), nb.p_minus, nb.p_plus, nb.left_arm, nb.right_arm))
    left = [r[3] for r in rows]
    assertions = {"left_arm_non_shrinking": all(b >= a for a, b in zip(left, left[1:]))}
    params = {"p0s": list(p0s), "delta_in": delta_in, "delta0": delta0, "epsilon": epsilon, "n": n, "profile": profile.to_dict()}
    return ExperimentResult("neighborhood-vs-p0", ("p0", "p_minus", "p_plus", "left_arm", "right_arm"), tuple(rows), assertions, params)


def eps_tradeoff(case="low", p=1.9, p0=2.0, norm=1.9, ap_value=1.01, F=None, delta0=None, grid=None):
    """J as a function of epsilon, with the golden-section optimum alongside."""
    F = F or PowerBound(1.0, 1.0)
    grid = np.linspace(0.02, 0.98, 49) if grid is None else np.asarray(grid)
    rows = []
    for eps in grid:
        rows.append((float(eps), j_bound(case, p, p0, float(eps), norm, ap_value, F, delta0)))
    Js = [r[1] for r in rows]
    k = int(np.argmin(Js))
    eps_star, J_star = optimize_epsilon(case, p, p0, norm, ap_value, F, delta0)
    step = float(grid[1] - grid[0])
    assertions = {
        "interior_minimum": 0 < k < len(Js) - 1,
        "optimizer_matches_scan": abs(eps_star - rows[k][0]) <= step and J_star <= Js[k] * (1 + 1e-12),
    }
    F_desc = F.to_dict() if hasattr(F, "to_dict") else {"form": "callable"}
    params = {"case": case, "p": p, "p0": p0, "norm": norm, "ap_value": ap_value, "F": F_desc, "eps_star": eps_star, "J_star": J_star}
    return ExperimentResult("eps-tradeoff", ("epsilon", "J"), tuple(rows), assertions, params)


EXPERIMENTS = {"norm-vs-p": norm_vs_p, "neighborhood-vs-p0": neighborhood_vs_p0, "eps-tradeoff": eps_tradeoff}
