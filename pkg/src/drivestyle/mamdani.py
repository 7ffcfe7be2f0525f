"""Mamdani inference: interval type-2 engine and its type-1 baseline.

Type-2 path: fuzzify, min t-norm firing intervals, center-of-sets type
reduction with Karnik-Mendel, midpoint defuzzification.

Type-1 path: the same rulebase evaluated on the upper membership functions
only, with min implication, max aggregation and a centroid over the output
universe.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DataError, InvalidParameters, NoRuleFired, NonFiniteInput
from .it2 import Interval, LinguisticVariable, MembershipInterval, eval_trapezoid, km_centroid, \
    km_weighted_average

TIE_TOL = 1e-9


class Rule(NamedTuple):
    antecedent: tuple[int, ...]
    consequent: int


@dataclass(frozen=True)
class RuleBase:
    """Immutable rulebase; consequent centroid intervals are cached at construction.

    ``partial=True`` admits rulebases that do not enumerate every antecedent
    combination (useful for small hand-built systems).
    """

    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rules: tuple[Rule, ...]
    partial: bool = False
    resolution: int = 1000
    _ante: np.ndarray = field(init=False, repr=False, compare=False)
    _cons: np.ndarray = field(init=False, repr=False, compare=False)
    _centroids: tuple[Interval, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(Rule(tuple(int(i) for i in r[0]), int(r[1]))
                                                for r in self.rules))
        if not self.rules:
            raise InvalidParameters("rulebase has no rules")
        sizes = [len(v.subsets) for v in self.inputs]
        seen = set()
        for r in self.rules:
            if len(r.antecedent) != len(sizes):
                raise InvalidParameters(f"rule {r} does not match {len(sizes)} inputs")
            if any(not 0 <= i < n for i, n in zip(r.antecedent, sizes)):
                raise InvalidParameters(f"rule {r} has an antecedent index out of range")
            if not 0 <= r.consequent < len(self.output.subsets):
                raise InvalidParameters(f"rule {r} has a consequent index out of range")
            if r.antecedent in seen:
                raise InvalidParameters(f"duplicate antecedent {r.antecedent}")
            seen.add(r.antecedent)
        if not self.partial and len(seen) != self.combinations:
            raise InvalidParameters(
                f"rulebase covers {len(seen)} of {self.combinations} antecedent combinations")
        object.__setattr__(self, "_ante", np.array([r.antecedent for r in self.rules], dtype=int))
        object.__setattr__(self, "_cons", np.array([r.consequent for r in self.rules], dtype=int))
        object.__setattr__(self, "_centroids",
                           tuple(km_centroid(s, self.resolution) for s in self.output.subsets))

    @property
    def combinations(self) -> int:
        return int(np.prod([len(v.subsets) for v in self.inputs]))

    @property
    def consequent_centroids(self) -> tuple[Interval, ...]:
        return self._centroids

    def permuted(self, order: Sequence[int]) -> "RuleBase":
        return RuleBase(self.inputs, self.output, tuple(self.rules[i] for i in order),
                        self.partial, self.resolution)


@dataclass(frozen=True)
class InferenceResult:
    fuzzified: list[list[MembershipInterval]]
    firings: list[MembershipInterval]
    reduced: Interval
    crisp: float
    label: str


def _check_input(x: Sequence[float], n: int) -> np.ndarray:
    arr = np.asarray(tuple(x), dtype=float)
    if arr.shape != (n,):
        raise InvalidParameters(f"expected {n} features, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"non-finite feature vector {arr.tolist()}")
    return arr


def _fuzzify_arrays(x, inputs, upper_only=False):
    arr = _check_input(x, len(inputs))
    out = []
    for v, xi in zip(inputs, arr):
        lo, hi = v.memberships(v.clamp(xi))
        out.append((hi.copy() if upper_only else lo, hi))
    return out


def fuzzify(x: Sequence[float], inputs: Sequence[LinguisticVariable]) -> list[list[MembershipInterval]]:
    """Membership interval of each (clamped) input in every subset of its variable."""
    return [[MembershipInterval(float(a), float(b)) for a, b in zip(lo, hi)]
            for lo, hi in _fuzzify_arrays(x, inputs)]


def firing_strength(rule: Rule, grid: Sequence[Sequence[MembershipInterval]]) -> MembershipInterval:
    """Min t-norm over the antecedent intervals, applied bound by bound."""
    terms = [grid[v][i] for v, i in enumerate(rule.antecedent)]
    return MembershipInterval(min(t.lo for t in terms), min(t.hi for t in terms))


def _firing_arrays(rb: RuleBase, fz) -> tuple[np.ndarray, np.ndarray]:
    lo = np.min([fz[v][0][rb._ante[:, v]] for v in range(len(fz))], axis=0)
    hi = np.min([fz[v][1][rb._ante[:, v]] for v in range(len(fz))], axis=0)
    return lo, hi


def label_output(crisp: float, out: LinguisticVariable) -> str:
    """Subset with the largest upper membership; near-ties go to the later subset."""
    mu = np.array([eval_trapezoid(s.upper, out.clamp(crisp)) for s in out.subsets])
    best = np.flatnonzero(mu >= mu.max() - TIE_TOL)
    return out.subsets[int(best[-1])].name


def infer_t2(rb: RuleBase, x: Sequence[float]) -> InferenceResult:
    fz = _fuzzify_arrays(x, rb.inputs)
    lo, hi = _firing_arrays(rb, fz)
    active = hi > 0.0
    if not active.any():
        raise NoRuleFired(f"no rule fires for input {list(x)}")
    cents = np.array(rb.consequent_centroids)[rb._cons[active]]
    reduced = km_weighted_average(cents, np.c_[lo[active], hi[active]])
    crisp = reduced.midpoint
    return InferenceResult(
        fuzzified=[[MembershipInterval(float(a), float(b)) for a, b in zip(*v)] for v in fz],
        firings=[MembershipInterval(float(a), float(b)) for a, b in zip(lo, hi)],
        reduced=reduced,
        crisp=crisp,
        label=label_output(crisp, rb.output),
    )


def infer_t1(rb: RuleBase, x: Sequence[float], resolution: int = 1000) -> InferenceResult:
    fz = _fuzzify_arrays(x, rb.inputs, upper_only=True)
    _, f = _firing_arrays(rb, fz)
    if not (f > 0).any():
        raise NoRuleFired(f"no rule fires for input {list(x)}")
    y = rb.output.grid(resolution)
    # max over rules of min(firing, consequent UMF) reduces to one clip level per subset
    levels = np.zeros(len(rb.output.subsets))
    np.maximum.at(levels, rb._cons, f)
    agg = np.max([np.minimum(level, eval_trapezoid(s.upper, y))
                  for level, s in zip(levels, rb.output.subsets)], axis=0)
    area = np.trapezoid(agg, y)
    if area <= 0.0:
        raise NoRuleFired("aggregated output set is empty")
    crisp = float(np.trapezoid(agg * y, y) / area)
    return InferenceResult(
        fuzzified=[[MembershipInterval(float(b), float(b)) for b in v[1]] for v in fz],
        firings=[MembershipInterval(float(b), float(b)) for b in f],
        reduced=Interval(crisp, crisp),
        crisp=crisp,
        label=label_output(crisp, rb.output),
    )


# --------------------------------------------------------------------------
# CSV serialization
# --------------------------------------------------------------------------

def rulebase_to_csv(rb: RuleBase) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([v.name for v in rb.inputs] + [rb.output.name])
    for r in rb.rules:
        w.writerow([v.subsets[i].name for v, i in zip(rb.inputs, r.antecedent)]
                   + [rb.output.subsets[r.consequent].name])
    return buf.getvalue()


def write_rulebase(rb: RuleBase, path) -> None:
    Path(path).write_text(rulebase_to_csv(rb), encoding="utf-8")


def read_rulebase(path, inputs: Sequence[LinguisticVariable], output: LinguisticVariable,
                  partial: bool = False) -> RuleBase:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = [v.name for v in inputs] + [output.name]
        if header != expected:
            raise DataError(f"{path}: header {header} != {expected}")
        rules = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise DataError(f"{path}:{lineno}: expected {len(expected)} columns")
            try:
                ante = tuple(v.index(name) for v, name in zip(inputs, row[:-1]))
                rules.append(Rule(ante, output.index(row[-1])))
            except InvalidParameters as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    try:
        return RuleBase(tuple(inputs), output, tuple(rules), partial=partial)
    except InvalidParameters as exc:
        raise DataError(f"{path}: {exc}") from exc
