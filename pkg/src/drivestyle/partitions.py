"""Fuzzy partitions of the four inputs and the driving-style output.

``DEFAULT_PARTITIONS`` holds the published partition table. Each subset is
``(name, UMF, LMF)`` with trapezoids given as ``[a1, a2, a3, a4, h]``.
"""
from __future__ import annotations

from .errors import ConfigError, InvalidParameters
from .it2 import IT2TrapezoidSet, LinguisticVariable

INPUT_ORDER = ("mean_velocity", "mean_accel", "mean_decel", "std_lateral_jerk")
STYLES = ("Calm", "Moderate", "Aggressive")

_ACCEL = [
    ("Small", [0, 0, 2, 3.5, 1], [0, 0, 1.5, 2.7, 0.8]),
    ("Medium", [2, 3.5, 5.5, 7, 1], [2.7, 4, 5, 6.2, 0.8]),
    ("Large", [5.5, 7, 10, 10, 1], [6.2, 7.5, 10, 10, 0.8]),
]

DEFAULT_PARTITIONS = {
    "inputs": [
        {
            "name": "mean_velocity", "universe": [0, 100], "unit": "km/h",
            "subsets": [
                ("Very Slow", [0, 0, 15, 25, 1], [0, 0, 12, 20, 0.8]),
                ("Slow", [15, 25, 35, 45, 1], [20, 28, 32, 40, 0.8]),
                ("Normal", [35, 45, 55, 65, 1], [40, 48, 52, 60, 0.8]),
                ("Fast", [55, 65, 75, 85, 1], [60, 68, 72, 80, 0.8]),
                ("Very Fast", [75, 85, 100, 100, 1], [80, 88, 100, 100, 0.8]),
            ],
        },
        {"name": "mean_accel", "universe": [0, 10], "unit": "m/s^2", "subsets": _ACCEL},
        {"name": "mean_decel", "universe": [0, 10], "unit": "m/s^2", "subsets": _ACCEL},
        {
            "name": "std_lateral_jerk", "universe": [0, 16], "unit": "m/s^3",
            "subsets": [
                ("Small", [0, 0, 4, 6, 1], [0, 0, 3, 4.5, 0.8]),
                ("Medium", [3, 6, 10, 12.9, 1], [4.5, 6.9, 9.1, 11.4, 0.8]),
                ("Large", [10, 12, 16, 16, 1], [11.5, 13, 16, 16, 0.8]),
            ],
        },
    ],
    "output": {
        "name": "driving_style", "universe": [0, 1], "unit": "",
        "subsets": [
            ("Calm", [0, 0, 0.2, 0.4, 1], [0, 0, 0.15, 0.3, 0.8]),
            ("Moderate", [0.2, 0.4, 0.6, 0.8, 1], [0.3, 0.45, 0.55, 0.7, 0.8]),
            ("Aggressive", [0.6, 0.8, 1, 1, 1], [0.7, 0.85, 1, 1, 0.8]),
        ],
    },
}


def variable_from_dict(d: dict) -> LinguisticVariable:
    try:
        lo, hi = d["universe"]
        subsets = []
        for item in d["subsets"]:
            if isinstance(item, dict):
                name, upper, lower = item["name"], item["upper"], item["lower"]
            else:
                name, upper, lower = item
            subsets.append(IT2TrapezoidSet.from_lists(name, upper, lower))
        return LinguisticVariable(d["name"], float(lo), float(hi), tuple(subsets), d.get("unit", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameters):
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"malformed partition entry: {exc!r}") from exc


def variable_to_dict(v: LinguisticVariable) -> dict:
    return {
        "name": v.name,
        "universe": [v.lo, v.hi],
        "unit": v.unit,
        "subsets": [
            {"name": s.name, "upper": s.upper.as_list(), "lower": s.lower.as_list()}
            for s in v.subsets
        ],
    }


def load_partitions(d: dict | None = None) -> tuple[list[LinguisticVariable], LinguisticVariable]:
    """Build (inputs, output) variables from a partitions mapping."""
    d = DEFAULT_PARTITIONS if d is None else d
    try:
        inputs = [variable_from_dict(v) for v in d["inputs"]]
        output = variable_from_dict(d["output"])
    except KeyError as exc:
        raise ConfigError(f"partitions missing key {exc}") from exc
    return inputs, output


def default_variables() -> tuple[list[LinguisticVariable], LinguisticVariable]:
    return load_partitions(DEFAULT_PARTITIONS)


def collapse_fou(v: LinguisticVariable) -> LinguisticVariable:
    """Copy of ``v`` with every LMF replaced by its UMF at full height."""
    subsets = []
    for s in v.subsets:
        up = s.upper.as_list()[:4] + [1.0]
        subsets.append(IT2TrapezoidSet.type1(s.name, up))
    return LinguisticVariable(v.name, v.lo, v.hi, tuple(subsets), v.unit)
