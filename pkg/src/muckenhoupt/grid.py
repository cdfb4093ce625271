"""Discrete domain model on [0, 1).

A vector of ``n`` samples stands for the piecewise-constant function that
equals ``values[k]`` on the cell ``[k/n, (k+1)/n)``, so averages over
index ranges are exact continuum averages over unions of cells.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
import numpy as np
from scipy.ndimage import gaussian_filter1d

from ._kernels import compensated_cumsum
from .exceptions import DynamicRangeError, GridMismatch

__all__ = [
    "Grid1D",
    "Sampled",
    "Weight",
    "Interval",
    "IntervalFamily",
    "Exponent",
    "PrefixSums",
    "as_p",
    "conjugate",
    "interval_average",
    "lp_norm",
    "dual_weight",
    "make_weight",
    "read_samples",
    "read_weight",
    "write_samples",
]


@dataclass(frozen=True)
class Grid1D:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs an integer n >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) / self.n


@dataclass(frozen=True, eq=False)
class Sampled:
    """A real function sampled on a grid. The value array is read-only."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.shape != (self.grid.n,):
            raise GridMismatch(f"expected {self.grid.n} samples, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sampled values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=np.float64)
        return cls(Grid1D(values.shape[0]), values)

    @property
    def n(self) -> int:
        return self.grid.n

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, min={self.values.min():.6g}, max={self.values.max():.6g})"


class Weight(Sampled):
    """Strictly positive sampled function, used as the density of a measure."""

    def __post_init__(self):
        super().__post_init__()
        if not np.all(self.values > 0):
            raise ValueError("weight values must be strictly positive")


@dataclass(frozen=True, order=True)
class Interval:
    """Inclusive index range ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    def check(self, n: int) -> "Interval":
        if self.hi >= n:
            raise ValueError(f"interval [{self.lo}, {self.hi}] leaves a grid of size {n}")
        return self

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class IntervalFamily:
    """Which index ranges the suprema run over.

    ``all`` is every one of the ``n(n+1)/2`` intervals. ``dyadic`` is the
    standard dyadic tree (``n`` a power of two). ``shifted`` adds, at each
    dyadic scale ``L``, translates of the dyadic grid by ``round(i*L/shifts)``
    cells, clipped to the domain: the one-third trick for ``shifts=3``.
    """

    kind: str = "all"
    shifts: int = 3

    def __post_init__(self):
        if self.kind not in ("all", "dyadic", "shifted"):
            raise ValueError(f"unknown interval family {self.kind!r}")
        if self.shifts < 1:
            raise ValueError("shifts must be >= 1")

    @classmethod
    def all_intervals(cls):
        return cls("all")

    @classmethod
    def dyadic(cls):
        return cls("dyadic")

    @classmethod
    def shifted_dyadic(cls, shifts: int = 3):
        return cls("shifted", shifts)

    @classmethod
    def parse(cls, text: str) -> "IntervalFamily":
        text = text.strip().lower()
        if text in ("all", "allintervals", "all_intervals"):
            return cls.all_intervals()
        if text == "dyadic":
            return cls.dyadic()
        m = re.fullmatch(r"shifted(?:[_-]?dyadic)?(?::(\d+))?", text)
        if m:
            return cls.shifted_dyadic(int(m.group(1) or 3))
        raise ValueError(f"unknown interval family {text!r}")

    @property
    def label(self) -> str:
        return "shifted:%d" % self.shifts if self.kind == "shifted" else self.kind

    def contains_singletons(self, n: int) -> bool:
        return self.kind == "all" or bool(self.partitions(n))

    def partitions(self, n: int) -> list[np.ndarray]:
        """Breakpoint arrays; each one splits ``[0, n)`` into family members."""
        if self.kind == "all":
            raise ValueError("the full family is not a union of partitions")
        return [np.array(b) for b in _partitions(self.kind, self.shifts, n)]

    def intervals(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """All members as ``(lo, hi)`` arrays, sorted by ``lo`` then ``hi``."""
        if self.kind == "all":
            lo, hi = np.triu_indices(n)
            return lo.astype(np.int64), hi.astype(np.int64)
        pairs = set()
        for b in self.partitions(n):
            pairs.update(zip(b[:-1].tolist(), (b[1:] - 1).tolist()))
        arr = np.array(sorted(pairs), dtype=np.int64)
        return arr[:, 0], arr[:, 1]


@lru_cache(maxsize=64)
def _partitions(kind: str, shifts: int, n: int) -> tuple[tuple[int, ...], ...]:
    if kind == "dyadic" and not _is_power_of_two(n):
        raise ValueError(f"the dyadic family needs n to be a power of two, got {n}")
    top = 1 << max(0, math.ceil(math.log2(n)))
    out = []
    seen = set()
    length = 1
    while length <= top:
        offsets = [0] if kind == "dyadic" else sorted({round(i * length / shifts) % length for i in range(shifts)})
        for off in offsets:
            cuts = set(range(off, n, length)) | {0, n}
            b = tuple(sorted(c for c in cuts if 0 <= c <= n))
            if b not in seen:
                seen.add(b)
                out.append(b)
        length *= 2
    return tuple(out)


@dataclass(frozen=True)
class Exponent:
    """Lebesgue exponent in the open interval (1, inf)."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", as_p(self.p))

    def __float__(self):
        return self.p

    @property
    def dual(self) -> "Exponent":
        return Exponent(conjugate(self.p))


def as_p(p) -> float:
    value = float(p)
    if not (1.0 < value < math.inf):
        raise ValueError(f"exponent must lie in (1, inf), got {value}")
    return value


def conjugate(p) -> float:
    """Hölder conjugate ``p/(p-1)``."""
    p = as_p(p)
    return p / (p - 1.0)


class PrefixSums:
    """Compensated prefix sums answering interval sums and averages in O(1).

    A prefix difference only resolves about 2^-104 of the prefix magnitude;
    intervals whose sum falls below that scale are re-summed exactly.
    """

    CANCELLATION = 1e-28

    def __init__(self, values):
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        self.s, self.c = compensated_cumsum(self.values)

    def sums(self, lo, hi):
        lo, hi = np.broadcast_arrays(np.asarray(lo), np.asarray(hi) + 1)
        shape = lo.shape
        lo, hi = lo.ravel(), hi.ravel()
        out = (self.s[hi] - self.s[lo]) + (self.c[hi] - self.c[lo])
        bad = np.abs(out) <= self.CANCELLATION * np.maximum(np.abs(self.s[hi]), np.abs(self.s[lo]))
        for k in np.flatnonzero(bad):
            out[k] = math.fsum(self.values[lo[k] : hi[k]])
        return out.reshape(shape)

    def average(self, lo, hi):
        return self.sums(lo, hi) / (np.asarray(hi) - np.asarray(lo) + 1)


def values_of(f) -> np.ndarray:
    if isinstance(f, Sampled):
        return f.values
    return np.asarray(f, dtype=np.float64)


def same_grid(*objs) -> int:
    ns = {len(values_of(o)) for o in objs if o is not None}
    if len(ns) != 1:
        raise GridMismatch(f"objects live on grids of sizes {sorted(ns)}")
    return ns.pop()


def interval_average(f, interval: Interval) -> float:
    x = values_of(f)
    interval.check(len(x))
    return float(PrefixSums(x).average(interval.lo, interval.hi))


def lp_norm(f, p, w=None) -> float:
    """``(h * sum |f|^p w)^(1/p)``; ``w=None`` means Lebesgue measure."""
    p = as_p(p)
    x = values_of(f)
    n = same_grid(x, w)
    integrand = np.abs(x) ** p
    if w is not None:
        integrand = integrand * values_of(w)
    return float((np.sum(integrand) / n) ** (1.0 / p))


def dual_weight(w, p) -> Weight:
    """Pointwise ``w^(1 - p')``."""
    x = values_of(w)
    with np.errstate(over="ignore", divide="ignore", under="ignore"):
        out = x ** (1.0 - conjugate(p))
    if not (np.all(np.isfinite(out)) and np.all(out > 0)):
        raise DynamicRangeError(f"w^(1-p') overflows for p={float(p)}: weight range [{x.min():.3g}, {x.max():.3g}]")
    return Weight(Grid1D(len(x)), out)


# ---------------------------------------------------------------- generators

_GENERATORS = ("constant", "step", "power", "sine_flat", "random_flat")


def _parse_spec(spec) -> tuple[str, list[float]]:
    if isinstance(spec, str):
        name, _, rest = spec.partition(":")
        params = [float(v) for v in rest.split(",") if v.strip()] if rest else []
    else:
        name, *params = spec
        params = [float(v) for v in params]
    name = name.strip().lower()
    if name not in _GENERATORS:
        raise ValueError(f"unknown weight generator {name!r}; choose from {', '.join(_GENERATORS)}")
    return name, params


def smoothed_noise(n: int, seed: int) -> np.ndarray:
    """Gaussian noise smoothed at scale n/32, rescaled to max |xi| = 1."""
    rng = np.random.default_rng(seed)
    xi = gaussian_filter1d(rng.standard_normal(n), sigma=max(1.0, n / 32), mode="reflect")
    xi = xi - xi.mean()
    return xi / np.max(np.abs(xi))


def make_weight(spec, n: int | Grid1D = 256, seed: int | None = None) -> Weight:
    """Build a test weight from ``"name:params"`` or ``(name, *params)``.

    Generators::

        constant:c              w = c
        step:a,b[,split]        a on cells < split (default n/2), b after
        power:alpha[,center]    |x - center|^alpha, distance clamped below at h/2
        sine_flat:delta         exp(delta * sin(2 pi x))
        random_flat:delta[,seed]  exp(delta * xi), xi smoothed noise with max |xi| = 1
    """
    grid = n if isinstance(n, Grid1D) else Grid1D(n)
    name, prm = _parse_spec(spec)
    x = grid.centers()
    if name == "constant":
        c = prm[0] if prm else 1.0
        if c <= 0:
            raise ValueError("constant weight needs c > 0")
        vals = np.full(grid.n, c)
    elif name == "step":
        if len(prm) < 2:
            raise ValueError("step weight needs a,b")
        a, b = prm[:2]
        split = int(prm[2]) if len(prm) > 2 else grid.n // 2
        if a <= 0 or b <= 0:
            raise ValueError("step weight needs a, b > 0")
        if not 0 < split < grid.n:
            raise ValueError("step split must be inside the grid")
        vals = np.where(np.arange(grid.n) < split, a, b).astype(np.float64)
    elif name == "power":
        if not prm:
            raise ValueError("power weight needs alpha")
        alpha = prm[0]
        center = prm[1] if len(prm) > 1 else 0.5
        dist = np.maximum(np.abs(x - center), grid.h / 2)
        vals = dist**alpha
    else:
        if not prm:
            raise ValueError(f"{name} weight needs delta")
        delta = prm[0]
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if name == "sine_flat":
            vals = np.exp(delta * np.sin(2 * np.pi * x))
        else:
            s = int(prm[1]) if len(prm) > 1 else (0 if seed is None else int(seed))
            vals = np.exp(delta * smoothed_noise(grid.n, s))
    return Weight(grid, vals)


# ----------------------------------------------------------------------- CSV

_HEADER = re.compile(r"#\s*n\s*=\s*(\d+)\s*")


def read_samples(path) -> Sampled:
    """Read one decimal sample per line, with an optional ``# n=<count>`` header."""
    declared = None
    vals = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.fullmatch(line)
            if m is None or vals or declared is not None:
                raise ValueError(f"{path}:{lineno}: unexpected comment line")
            declared = int(m.group(1))
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    if declared is not None and declared != len(vals):
        raise ValueError(f"{path}: header declares n={declared} but {len(vals)} samples follow")
    return Sampled.of(vals)


def read_weight(path) -> Weight:
    s = read_samples(path)
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        raise ValueError(f"{path}: nonpositive weight entry at sample {int(bad[0])}")
    return Weight(s.grid, s.values)


def write_samples(path, f, header: bool = True) -> None:
    x = values_of(f)
    lines = ["# n=%d" % len(x)] if header else []
    lines.extend("%.17g" % v for v in x)
    Path(path).write_text("\n".join(lines) + "\n")
