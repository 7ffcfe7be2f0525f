"""Descriptive statistics per class and per feature, with CSV/JSON report emission."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptySeries, NonFiniteInput

STATISTICS = ("n", "mean", "std", "min", "q25", "q50", "q75", "max", "iqr")


@dataclass(frozen=True)
class DescriptiveSummary:
    mean: float
    std: float
    min: float
    max: float
    q25: float
    q50: float
    q75: float
    iqr: float
    n: int


def describe(values) -> DescriptiveSummary:
    """Population std and linear-interpolation quantiles (position ``(n-1)p``)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptySeries("cannot summarise an empty series")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("series contains non-finite values")
    q25, q50, q75 = np.quantile(v, [0.25, 0.5, 0.75], method="linear")
    lo, hi = float(v.min()), float(v.max())
    # clamp rounding so the ordering invariant holds exactly
    q25, q50, q75 = (float(min(max(q, lo), hi)) for q in (q25, q50, q75))
    q50 = max(q50, q25)
    q75 = max(q75, q50)
    if lo == hi:
        mean, std = lo, 0.0
    else:
        mean, std = float(min(max(v.mean(), lo), hi)), float(v.std())
    return DescriptiveSummary(mean, std, lo, hi, q25, q50, q75, q75 - q25, int(v.size))


def describe_by_class(X, labels: Sequence[str], features: Sequence[str],
                      classes: Sequence[str] | None = None
                      ) -> dict[str, dict[str, DescriptiveSummary | None]]:
    """Summaries keyed ``[class][feature]``; a class without members maps each feature to None.

    ``classes`` fixes the output order and lets absent classes be reported.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=object)
    if X.ndim != 2 or X.shape[1] != len(features) or len(labels) != len(X):
        raise ValueError("X must be rows x features with one label per row")
    if classes is None:
        classes = sorted(set(labels.tolist()))
    out: dict[str, dict[str, DescriptiveSummary | None]] = {}
    for c in classes:
        mask = labels == c
        if not mask.any():
            out[c] = {f: None for f in features}
        else:
            out[c] = {f: describe(X[mask, j]) for j, f in enumerate(features)}
    return out


def report_rows(tables: Mapping[tuple[str, str], Mapping[str, Mapping[str, DescriptiveSummary | None]]]
                ) -> list[tuple]:
    """Flatten ``{(source, filter): describe_by_class(...)}`` into long-format rows.

    Each row is ``(source, class, filter, feature, statistic, value)``; empty
    classes emit ``n = 0`` and blank values for the other statistics.
    """
    rows = []
    for (source, filt), table in tables.items():
        for cls, feats in table.items():
            for feat, summ in feats.items():
                for stat in STATISTICS:
                    if summ is None:
                        value = 0 if stat == "n" else ""
                    else:
                        value = getattr(summ, stat)
                    rows.append((source, cls, filt, feat, stat, value))
    return rows


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_report_csv(rows: Iterable[tuple], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "class", "filter", "feature", "statistic", "value"])
        for r in rows:
            w.writerow([*r[:5], _fmt(r[5])])


def write_report_json(tables, path) -> None:
    doc = []
    for (source, filt), table in tables.items():
        doc.append({
            "source": source,
            "filter": filt,
            "classes": {cls: {feat: (None if s is None else asdict(s)) for feat, s in feats.items()}
                        for cls, feats in table.items()},
        })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")
