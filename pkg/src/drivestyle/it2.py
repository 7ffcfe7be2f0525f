"""Interval type-2 trapezoidal fuzzy sets and Karnik-Mendel type reduction.

An interval type-2 set is a pair of ordinary (type-1) trapezoids: the
upper membership function (UMF) and the lower membership function (LMF).
Membership at a point is the interval between the two curves.

All objects here are immutable; every function is pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptySet, InvalidParameters, NoRuleFired

_GRID = 1000
_TOL = 1e-12


@dataclass(frozen=True)
class TrapezoidParams:
    """Breakpoints ``a1 <= a2 <= a3 <= a4`` and plateau height ``h``."""

    a1: float
    a2: float
    a3: float
    a4: float
    h: float = 1.0

    def __post_init__(self):
        pts = (self.a1, self.a2, self.a3, self.a4, self.h)
        if not all(np.isfinite(pts)):
            raise InvalidParameters(f"non-finite trapezoid parameters {pts}")
        if not (self.a1 <= self.a2 <= self.a3 <= self.a4):
            raise InvalidParameters(f"breakpoints must be ordered, got {pts[:4]}")
        if not (0.0 < self.h <= 1.0):
            raise InvalidParameters(f"height must lie in (0, 1], got {self.h}")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "TrapezoidParams":
        values = [float(v) for v in values]
        if len(values) == 4:
            values.append(1.0)
        if len(values) != 5:
            raise InvalidParameters(f"expected a1..a4[,h], got {values}")
        return cls(*values)

    def as_list(self) -> list[float]:
        return [self.a1, self.a2, self.a3, self.a4, self.h]

    def shifted(self, delta: float) -> "TrapezoidParams":
        return TrapezoidParams(self.a1 + delta, self.a2 + delta, self.a3 + delta,
                               self.a4 + delta, self.h)


def eval_trapezoid(p: TrapezoidParams, x):
    """Evaluate a trapezoid at scalar or array ``x``.

    Zero-width edges (``a1 == a2`` or ``a3 == a4``) are steps: the shared
    abscissa belongs to the plateau, so shoulder sets reach ``h`` there.
    """
    xa = np.asarray(x, dtype=float)
    y = np.zeros_like(xa)
    plateau = (xa >= p.a2) & (xa <= p.a3)
    y[plateau] = p.h
    if p.a2 > p.a1:
        rise = (xa > p.a1) & (xa < p.a2)
        y[rise] = p.h * (xa[rise] - p.a1) / (p.a2 - p.a1)
    if p.a4 > p.a3:
        fall = (xa > p.a3) & (xa < p.a4)
        y[fall] = p.h * (p.a4 - xa[fall]) / (p.a4 - p.a3)
    if np.ndim(x) == 0:
        return float(y)
    return y


@dataclass(frozen=True)
class MembershipInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (-_TOL <= self.lo <= self.hi + _TOL and self.hi <= 1.0 + _TOL):
            raise InvalidParameters(f"ill-formed membership interval [{self.lo}, {self.hi}]")

    def __iter__(self):
        yield self.lo
        yield self.hi

    @property
    def is_zero(self) -> bool:
        return self.hi <= 0.0


class Interval(NamedTuple):
    left: float
    right: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)

    @property
    def width(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class IT2TrapezoidSet:
    name: str
    upper: TrapezoidParams
    lower: TrapezoidParams

    def __post_init__(self):
        if self.lower.h > self.upper.h:
            raise InvalidParameters(f"{self.name}: LMF height exceeds UMF height")
        if self.lower.a1 < self.upper.a1 or self.lower.a4 > self.upper.a4:
            raise InvalidParameters(f"{self.name}: LMF support leaves UMF support")
        grid = self._check_grid()
        if np.any(eval_trapezoid(self.lower, grid) > eval_trapezoid(self.upper, grid) + _TOL):
            raise InvalidParameters(f"{self.name}: LMF exceeds UMF somewhere")

    def _check_grid(self) -> np.ndarray:
        lo, hi = self.upper.a1, self.upper.a4
        knots = self.upper.as_list()[:4] + self.lower.as_list()[:4]
        return np.union1d(np.linspace(lo, hi, _GRID), knots)

    @classmethod
    def from_lists(cls, name: str, upper: Sequence[float], lower: Sequence[float]):
        return cls(name, TrapezoidParams.from_sequence(upper), TrapezoidParams.from_sequence(lower))

    @classmethod
    def type1(cls, name: str, params: Sequence[float]) -> "IT2TrapezoidSet":
        """A set whose FOU has collapsed: lower and upper are the same curve."""
        p = TrapezoidParams.from_sequence(params)
        return cls(name, p, p)

    @property
    def support(self) -> tuple[float, float]:
        return self.upper.a1, self.upper.a4

    def shifted(self, delta: float) -> "IT2TrapezoidSet":
        return IT2TrapezoidSet(self.name, self.upper.shifted(delta), self.lower.shifted(delta))


def membership_interval(s: IT2TrapezoidSet, x: float) -> MembershipInterval:
    lo = eval_trapezoid(s.lower, x)
    hi = eval_trapezoid(s.upper, x)
    return MembershipInterval(min(lo, hi), hi)


@dataclass(frozen=True)
class LinguisticVariable:
    """A named universe ``[lo, hi]`` partitioned by ordered IT2 subsets."""

    name: str
    lo: float
    hi: float
    subsets: tuple[IT2TrapezoidSet, ...]
    unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(self.subsets))
        if not self.hi > self.lo:
            raise InvalidParameters(f"{self.name}: empty universe [{self.lo}, {self.hi}]")
        if not self.subsets:
            raise InvalidParameters(f"{self.name}: no subsets")
        names = [s.name for s in self.subsets]
        if len(set(names)) != len(names):
            raise InvalidParameters(f"{self.name}: duplicate subset names {names}")
        for s in self.subsets:
            a, b = s.support
            if a < self.lo - _TOL or b > self.hi + _TOL:
                raise InvalidParameters(f"{self.name}/{s.name}: support [{a}, {b}] outside universe")
        grid = self.grid(_GRID)
        cover = np.max([eval_trapezoid(s.upper, grid) for s in self.subsets], axis=0)
        if np.any(cover <= 0.0):
            gap = grid[np.argmax(cover <= 0.0)]
            raise InvalidParameters(f"{self.name}: universe not covered near {gap:g}")

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.subsets]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidParameters(f"{self.name}: unknown subset {name!r}") from None

    def grid(self, n: int = _GRID) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)

    def clamp(self, x: float) -> float:
        return float(min(max(x, self.lo), self.hi))

    def memberships(self, x: float) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper memberships of ``x`` in every subset (no clamping)."""
        lo = np.array([eval_trapezoid(s.lower, x) for s in self.subsets])
        hi = np.array([eval_trapezoid(s.upper, x) for s in self.subsets])
        return np.minimum(lo, hi), hi


# --------------------------------------------------------------------------
# Karnik-Mendel
# --------------------------------------------------------------------------

def _km_endpoint(c: np.ndarray, lo: np.ndarray, hi: np.ndarray, right: bool) -> float:
    """Extremum of sum(f*c)/sum(f) over f in [lo, hi]; ``c`` sorted ascending.

    Requires every ``hi > 0`` so that each switched weight vector has a
    positive sum.
    """
    n = len(c)
    if n == 1:
        return float(c[0])
    f = 0.5 * (lo + hi)
    y = float(f @ c / f.sum())
    k = -1
    for _ in range(n + 1):
        k_new = int(np.clip(np.searchsorted(c, y, side="right") - 1, 0, n - 2))
        if k_new == k:
            return y
        k = k_new
        if right:
            f = np.concatenate([lo[: k + 1], hi[k + 1:]])
        else:
            f = np.concatenate([hi[: k + 1], lo[k + 1:]])
        y = float(f @ c / f.sum())
    return y


def _km_interval(cl, cr, lo, hi) -> Interval:
    cl, cr, lo, hi = (np.asarray(v, dtype=float) for v in (cl, cr, lo, hi))
    order = np.argsort(cl, kind="stable")
    y_l = _km_endpoint(cl[order], lo[order], hi[order], right=False)
    order = np.argsort(cr, kind="stable")
    y_r = _km_endpoint(cr[order], lo[order], hi[order], right=True)
    return Interval(y_l, max(y_l, y_r))


def km_centroid(s: IT2TrapezoidSet, resolution: int = _GRID) -> Interval:
    """Centroid interval ``[c_l, c_r]`` of an IT2 set over its discretized support."""
    if resolution < 2:
        raise InvalidParameters("resolution must be at least 2")
    a, b = s.support
    if not b > a:
        raise InvalidParameters(f"{s.name}: degenerate support")
    x = np.linspace(a, b, resolution)
    hi = eval_trapezoid(s.upper, x)
    lo = np.minimum(eval_trapezoid(s.lower, x), hi)
    keep = hi > 0.0
    if not keep.any():
        raise EmptySet(f"{s.name}: zero upper membership on the whole grid")
    x, lo, hi = x[keep], lo[keep], hi[keep]
    return _km_interval(x, x, lo, hi)


def km_weighted_average(endpoints: Sequence[Sequence[float]],
                        firings: Sequence[MembershipInterval | Sequence[float]]) -> Interval:
    """Center-of-sets type reduction.

    ``endpoints[i]`` is the centroid interval of rule ``i``'s consequent and
    ``firings[i]`` its firing interval. Rules with zero upper firing are
    dropped before the iteration.
    """
    if len(endpoints) != len(firings) or len(endpoints) == 0:
        raise InvalidParameters("endpoints and firings must be non-empty and the same length")
    c = np.asarray(endpoints, dtype=float).reshape(-1, 2)
    f = np.asarray([tuple(x) for x in firings], dtype=float).reshape(-1, 2)
    keep = f[:, 1] > 0.0
    if not keep.any():
        raise NoRuleFired("every firing interval is [0, 0]")
    return _km_interval(c[keep, 0], c[keep, 1], f[keep, 0], f[keep, 1])
