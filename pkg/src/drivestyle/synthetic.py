"""Synthetic fixtures: expert judgments and labelled trajectory corpora.

Nothing here is real data. The judgment table stands in for an
unpublished expert survey; the trajectories are generated from simple
kinematic profiles whose style is known by construction.
"""
from __future__ import annotations

import numpy as np

from .experts import JudgmentTable, antecedent_combinations
from .it2 import LinguisticVariable

# relative influence of each input on the perceived aggressiveness
_SEVERITY_WEIGHTS = (0.35, 0.2, 0.2, 0.25)


def synthetic_judgments(inputs: list[LinguisticVariable], n: int = 8, seed: int = 2023,
                        weights=_SEVERITY_WEIGHTS) -> JudgmentTable:
    """Judgment table of ``n`` simulated experts.

    Each rule gets a latent severity in [0, 1] that grows with every
    antecedent index. Experts rate ``1 + 8 * severity`` with a personal bias
    and per-rule noise, rounded and clipped to the 1..9 scale.
    """
    rng = np.random.default_rng(seed)
    combos = antecedent_combinations(inputs)
    sizes = np.array([len(v.subsets) - 1 for v in inputs], dtype=float)
    sev = np.array([np.dot(weights, np.array(c) / sizes) for c in combos])
    bias = np.linspace(-1.0, 1.0, n)
    rng.shuffle(bias)
    noise = rng.normal(0.0, 0.7, size=(len(combos), n))
    terms = np.clip(np.rint(1 + 8 * sev[:, None] + bias[None, :] + noise), 1, 9).astype(int)
    antecedents = tuple(tuple(v.subsets[i].name for v, i in zip(inputs, c)) for c in combos)
    experts = tuple(f"expert_{i + 1}" for i in range(n))
    return JudgmentTable(tuple(v.name for v in inputs), experts, antecedents, terms)


# --------------------------------------------------------------------------
# trajectories
# --------------------------------------------------------------------------

# (base speed m/s, speed swing m/s, lateral weave amplitude m)
STYLE_PROFILES = {
    "Calm": {"speed": (4.0, 6.0), "swing": (0.2, 0.5), "weave": (0.02, 0.08)},
    "Moderate": {"speed": (12.0, 16.0), "swing": (1.8, 2.6), "weave": (0.35, 0.55)},
    "Aggressive": {"speed": (23.0, 27.0), "swing": (3.8, 5.0), "weave": (0.9, 1.2)},
}


def style_trajectory(style: str, rng: np.random.Generator, duration: float = 5.0,
                     rate: float = 10.0, noise: float = 0.0):
    """Positions ``(t, x, y)`` for one window of the given style.

    Speed oscillates sinusoidally around a base value; the path weaves
    sideways; the whole track is rotated to a random heading.
    """
    p = STYLE_PROFILES[style]
    n = int(round(duration * rate))
    t = np.arange(n) / rate
    v0 = rng.uniform(*p["speed"])
    swing = rng.uniform(*p["swing"])
    w_long = 2 * np.pi / rng.uniform(2.0, 3.0)
    phase = rng.uniform(0, 2 * np.pi)
    # along-track distance is the integral of v0 + swing * sin(w t + phase)
    s = v0 * t - swing / w_long * (np.cos(w_long * t + phase) - np.cos(phase))
    w_lat = 2 * np.pi / rng.uniform(2.0, 3.0)
    d = rng.uniform(*p["weave"]) * np.sin(w_lat * t + rng.uniform(0, 2 * np.pi))
    heading = rng.uniform(-np.pi, np.pi)
    c, sn = np.cos(heading), np.sin(heading)
    x0, y0 = rng.uniform(-500, 500, size=2)
    x = x0 + c * s - sn * d
    y = y0 + sn * s + c * d
    if noise > 0:
        x = x + rng.normal(0, noise, n)
        y = y + rng.normal(0, noise, n)
    return t, x, y


def style_corpus(per_style: int = 100, seed: int = 7, noise: float = 0.0):
    """Rows ``(agent_id, t, x, y)`` plus the generating style per agent."""
    rng = np.random.default_rng(seed)
    rows, truth = [], {}
    k = 0
    for style in STYLE_PROFILES:
        for _ in range(per_style):
            agent = f"{style.lower()}_{k:04d}"
            t, x, y = style_trajectory(style, rng, noise=noise)
            rows.extend(zip([agent] * len(t), t, x, y))
            truth[agent] = style
            k += 1
    return rows, truth


def analytic_agents(rate: float = 10.0, duration: float = 5.0):
    """Three hand-checkable agents: cruise, steady acceleration, circular arc."""
    t = np.arange(int(round(duration * rate))) / rate
    rows = []
    # cruise at 10 m/s along x
    rows += [("cruise", ti, 10.0 * ti, 0.0) for ti in t]
    # 1 m/s^2 from 5 m/s along a diagonal
    s = 5.0 * t + 0.5 * t ** 2
    rows += [("accelerate", ti, si / np.sqrt(2), si / np.sqrt(2)) for ti, si in zip(t, s)]
    # 10 m/s on a 50 m circle
    ang = 10.0 / 50.0 * t
    rows += [("arc", ti, 50 * np.sin(a), 50 * (1 - np.cos(a))) for ti, a in zip(t, ang)]
    return rows
