"""Black-box operators fed to the extrapolation certifier.

Nothing about them is assumed beyond being a map on sample vectors; the
``structure`` tag is informational only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .grid import IntervalFamily, values_of
from .maximal import MaximalOperator

__all__ = ["TestOperator", "make_operator", "OPERATORS", "hilbert_matrix"]


@dataclass(frozen=True)
class TestOperator:
    __test__ = False  # keep pytest from collecting this as a test class

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    structure: str = "none"

    def __post_init__(self):
        if self.structure not in ("none", "sublinear", "linear"):
            raise ValueError(f"unknown structure tag {self.structure!r}")

    def __call__(self, f) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(values_of(f), dtype=np.float64)), dtype=np.float64)


@lru_cache(maxsize=8)
def hilbert_matrix(n: int) -> np.ndarray:
    """``H[j, k] = 1 / (pi (j - k))`` off the diagonal, zero on it."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(np.float64)
    np.fill_diagonal(d, np.inf)
    m = 1.0 / (np.pi * d)
    m.flags.writeable = False
    return m


def _hilbert(x):
    return hilbert_matrix(x.shape[0]) @ x


def _rough_truncation(x, keep=0.125):
    # hard cutoff in frequency: discontinuous multiplier, no smoothing
    coef = np.fft.rfft(x)
    coef[int(keep * x.shape[0]) + 1 :] = 0.0
    return np.fft.irfft(coef, n=x.shape[0])


OPERATORS = ("identity", "zero", "maximal", "hilbert", "rough_truncation")


def make_operator(name: str, family: IntervalFamily | None = None) -> TestOperator:
    if name == "identity":
        return TestOperator("identity", lambda x: x.copy(), "linear")
    if name == "zero":
        return TestOperator("zero", np.zeros_like, "linear")
    if name == "maximal":
        op = MaximalOperator(family or IntervalFamily())
        return TestOperator("maximal", op.values, "sublinear")
    if name == "hilbert":
        return TestOperator("hilbert", _hilbert, "linear")
    if name == "rough_truncation":
        return TestOperator("rough_truncation", _rough_truncation, "linear")
    raise ValueError(f"unknown operator {name!r}; choose from {', '.join(OPERATORS)}")
