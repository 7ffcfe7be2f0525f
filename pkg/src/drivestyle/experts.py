"""Rulebase construction from several experts' judgments, aggregated with OWA.

Each expert rates every antecedent combination on a 1..9 scale running from
Calm (1) to Aggressive (9). Ratings are mapped to ``[0, 1]`` by ``x / 9``,
combined with an ordered weighted average whose weights come from a
piecewise-linear linguistic quantifier, and the result is mapped back onto
the driving-style partition.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, IncompleteJudgments, InvalidQuantifier, LengthMismatch
from .it2 import LinguisticVariable
from .mamdani import Rule, RuleBase, label_output

TERMS = {
    1: "Calm",
    2: "More Calm Than Moderate",
    3: "Between Calm And Moderate",
    4: "More Moderate Than Calm",
    5: "Moderate",
    6: "More Moderate Than Aggressive",
    7: "Between Moderate And Aggressive",
    8: "More Aggressive Than Moderate",
    9: "Aggressive",
}
TERM_SCALE = 9


@dataclass(frozen=True)
class OwaWeights:
    w: tuple[float, ...]
    a: float
    b: float

    def __post_init__(self):
        w = np.asarray(self.w)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidQuantifier(f"weights must be non-negative and sum to 1, got {self.w}")

    @property
    def n(self) -> int:
        return len(self.w)


def quantifier(r, a: float, b: float):
    """Piecewise-linear quantifier: 0 below ``a``, 1 above ``b``, linear between."""
    return np.clip((np.asarray(r, dtype=float) - a) / (b - a), 0.0, 1.0)


def owa_weights(n: int, a: float = 0.0, b: float = 0.5) -> OwaWeights:
    if int(n) != n or n < 2:
        raise InvalidQuantifier(f"need at least two experts, got n={n}")
    if not (0.0 <= a < b <= 1.0):
        raise InvalidQuantifier(f"quantifier needs 0 <= a < b <= 1, got ({a}, {b})")
    q = quantifier(np.arange(n + 1) / n, a, b)
    return OwaWeights(tuple(float(v) for v in np.diff(q)), float(a), float(b))


def map_term(t: int) -> float:
    if int(t) != t or not 1 <= t <= TERM_SCALE:
        raise DataError(f"expert term must be an integer in 1..{TERM_SCALE}, got {t!r}")
    return t / TERM_SCALE


def aggregate_opinions(opinions: Sequence[int], w: OwaWeights) -> float:
    if len(opinions) != w.n:
        raise LengthMismatch(f"{len(opinions)} opinions for {w.n} weights")
    mapped = np.array([map_term(t) for t in opinions])
    ordered = -np.sort(-mapped, kind="stable")
    return float(np.dot(w.w, ordered))


def median_opinion(opinions: Sequence[int]) -> float:
    """Median of the mapped opinions; the neutral baseline OWA is compared against."""
    return float(np.median([map_term(t) for t in opinions]))


def consequent_from_value(v: float, out: LinguisticVariable) -> int:
    return out.index(label_output(v, out))


@dataclass(frozen=True)
class JudgmentTable:
    """Expert ratings: ``terms[r, e]`` is expert ``e``'s rating of antecedent row ``r``."""

    variables: tuple[str, ...]
    experts: tuple[str, ...]
    antecedents: tuple[tuple[str, ...], ...]
    terms: np.ndarray

    def __post_init__(self):
        if len(self.experts) < 2:
            raise DataError("a judgment table needs at least two experts")
        t = np.asarray(self.terms)
        if t.shape != (len(self.antecedents), len(self.experts)):
            raise DataError(f"terms shape {t.shape} does not match rows x experts")
        if t.size and (t.min() < 1 or t.max() > TERM_SCALE):
            raise DataError(f"expert terms outside 1..{TERM_SCALE}")

    @property
    def n(self) -> int:
        return len(self.experts)


def read_judgments(path) -> JudgmentTable:
    """Load a judgment CSV.

    The first four columns name the antecedent subsets; every further column
    is one expert's integer term.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise DataError(f"{path}: empty judgment file")
    header, body = rows[0], rows[1:]
    nvar = 4
    variables, experts = tuple(header[:nvar]), tuple(header[nvar:])
    antecedents, terms = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            terms.append([int(v) for v in row[nvar:]])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        antecedents.append(tuple(row[:nvar]))
    return JudgmentTable(variables, experts, tuple(antecedents),
                         np.array(terms, dtype=int).reshape(len(body), len(experts)))


def write_judgments(jt: JudgmentTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(jt.variables) + list(jt.experts))
        for ante, row in zip(jt.antecedents, jt.terms):
            w.writerow(list(ante) + [int(t) for t in row])


def antecedent_combinations(inputs: Sequence[LinguisticVariable]) -> list[tuple[int, ...]]:
    """Lexicographic enumeration: first variable slowest, subset indices ascending."""
    return list(itertools.product(*(range(len(v.subsets)) for v in inputs)))


def build_rulebase(jt: JudgmentTable, a: float, b: float,
                   inputs: Sequence[LinguisticVariable], output: LinguisticVariable,
                   method: str = "owa") -> tuple[RuleBase, dict]:
    """Aggregate every row of ``jt`` into one rule.

    Returns the rulebase and a provenance record with the weights and the
    aggregated value behind each rule. ``method="median"`` replaces the OWA
    with the plain median of the experts.
    """
    if tuple(jt.variables) != tuple(v.name for v in inputs):
        raise DataError(f"judgment columns {list(jt.variables)} do not match inputs "
                        f"{[v.name for v in inputs]}")
    weights = owa_weights(jt.n, a, b)
    rows = {}
    for ante, terms in zip(jt.antecedents, jt.terms):
        try:
            key = tuple(v.index(name) for v, name in zip(inputs, ante))
        except Exception as exc:
            raise DataError(str(exc)) from exc
        if key in rows:
            raise DataError(f"duplicate judgment row {ante}")
        rows[key] = terms
    combos = antecedent_combinations(inputs)
    missing = [c for c in combos if c not in rows]
    if missing:
        raise IncompleteJudgments([tuple(v.subsets[i].name for v, i in zip(inputs, c))
                                   for c in missing])
    if method not in ("owa", "median"):
        raise DataError(f"unknown aggregation method {method!r}")

    rules, records = [], []
    for combo in combos:
        terms = rows[combo]
        value = aggregate_opinions(terms, weights) if method == "owa" else median_opinion(terms)
        cons = consequent_from_value(value, output)
        rules.append(Rule(combo, cons))
        records.append({
            "antecedent": [v.subsets[i].name for v, i in zip(inputs, combo)],
            "opinions": [int(t) for t in terms],
            "aggregate": value,
            "consequent": output.subsets[cons].name,
        })
    provenance = {
        "method": method,
        "experts": list(jt.experts),
        "quantifier": {"a": weights.a, "b": weights.b},
        "weights": list(weights.w),
        "rules": records,
    }
    return RuleBase(tuple(inputs), output, tuple(rules)), provenance
