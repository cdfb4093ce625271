"""scikit-learn style wrappers.

Each row of ``X`` is one sampled function on the grid, so the estimators
drop into pipelines that produce or consume batches of profiles.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .characteristics import a1_characteristic, ap_characteristic
from .grid import IntervalFamily, conjugate, dual_weight
from .maximal import MaximalOperator, estimate_operator_norm
from .rdf import RdFParams, build_dual_majorant, build_majorant

__all__ = ["MaximalFunction", "WeightCharacteristics", "RubioDeFranciaMajorant"]


def _check_width(est, X):
    if X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} samples per row, fitted on {est.n_features_in_}")


class MaximalFunction(TransformerMixin, BaseEstimator):
    """Row-wise maximal function."""

    def __init__(self, family="all", engine="fast"):
        self.family = family
        self.engine = engine

    def fit(self, X, y=None):
        X = check_array(X)
        self.n_features_in_ = X.shape[1]
        self.operator_ = MaximalOperator(IntervalFamily.parse(self.family), engine=self.engine)
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_array(X)
        _check_width(self, X)
        return np.vstack([self.operator_.values(row) for row in X])


class WeightCharacteristics(TransformerMixin, BaseEstimator):
    """Maps each positive row to ``[A_p characteristic, A_1 characteristic]``."""

    def __init__(self, p=2.0, family="all"):
        self.p = p
        self.family = family

    def fit(self, X, y=None):
        X = check_array(X)
        if np.any(X <= 0):
            raise ValueError("weights must be strictly positive")
        self.n_features_in_ = X.shape[1]
        self.family_ = IntervalFamily.parse(self.family)
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = check_array(X)
        _check_width(self, X)
        if np.any(X <= 0):
            raise ValueError("weights must be strictly positive")
        return np.array([[ap_characteristic(row, self.p, self.family_).value, a1_characteristic(row, self.family_).value] for row in X])

    def get_feature_names_out(self, input_features=None):
        return np.array([f"A_{self.p:g}", "A_1"], dtype=object)


class RubioDeFranciaMajorant(TransformerMixin, BaseEstimator):
    """Certified majorant of each nonnegative row.

    ``fit`` searches the maximal-operator norm on ``L^p(w)`` with the weight
    passed as ``sample_weight`` (Lebesgue measure when omitted); with
    ``dual=True`` it fits ``M'`` on ``L^p(w)`` instead.
    """

    def __init__(self, p=2.0, epsilon=0.5, family="all", dual=False, safety=1.0, tail_tol=None, strategy="coordinate_ascent", budget=1500, random_state=0):
        self.p = p
        self.epsilon = epsilon
        self.family = family
        self.dual = dual
        self.safety = safety
        self.tail_tol = tail_tol
        self.strategy = strategy
        self.budget = budget
        self.random_state = random_state

    def _params(self):
        return RdFParams(
            epsilon=self.epsilon,
            tail_tol=self.tail_tol,
            safety=self.safety,
            strategy=self.strategy,
            budget=self.budget,
            seed=self.random_state,
        )

    def fit(self, X, y=None, sample_weight=None):
        X = check_array(X)
        n = X.shape[1]
        w = np.ones(n) if sample_weight is None else check_array(sample_weight, ensure_2d=False)
        if w.shape != (n,) or np.any(w <= 0):
            raise ValueError("sample_weight must be a positive vector with one entry per grid cell")
        self.n_features_in_ = n
        self.weight_ = w
        self.operator_ = MaximalOperator(IntervalFamily.parse(self.family))
        params = self._params()
        if self.dual:
            sigma = dual_weight(w, conjugate(self.p))
            self.norm_estimate_ = estimate_operator_norm(self.operator_, self.p, sigma, **params.search()).value
        else:
            self.norm_estimate_ = estimate_operator_norm(self.operator_, self.p, w, **params.search()).value
        return self

    def build(self, X):
        """Full :class:`~muckenhoupt.rdf.Majorant` records, one per row."""
        check_is_fitted(self, "norm_estimate_")
        X = check_array(X)
        _check_width(self, X)
        builder = build_dual_majorant if self.dual else build_majorant
        params = self._params()
        return [builder(row, self.p, self.weight_, self.operator_, params, self.norm_estimate_) for row in X]

    def transform(self, X):
        return np.vstack([m.values.values for m in self.build(X)])
