"""Kinematic series and the four per-window features fed to the classifier."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DataError, InvalidParameters, TooShort, WindowTooShort
from .filters import KinematicState, Trajectory, derivative_series

MS_TO_KMH = 3.6
_SPEED_EPS = 1e-6


class FeatureVector(NamedTuple):
    mean_velocity: float      # km/h (or m/s when unit_mode="ms")
    mean_accel: float         # m/s^2, mean of positive longitudinal acceleration
    mean_decel: float         # m/s^2, mean magnitude of negative acceleration
    std_lateral_jerk: float   # m/s^3, population standard deviation

    def validate(self) -> "FeatureVector":
        if not all(np.isfinite(v) and v >= 0 for v in self):
            raise DataError(f"feature vector violates invariants: {tuple(self)}")
        return self


@dataclass(frozen=True)
class KinematicSeries:
    t: np.ndarray
    speed: np.ndarray
    accel_long: np.ndarray
    jerk_lat: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(getattr(self, k), dtype=float) for k in ("t", "speed", "accel_long", "jerk_lat")]
        if len({a.shape for a in arrs}) != 1:
            raise DataError("kinematic series fields have different lengths")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise DataError("kinematic series contains non-finite values")
        for k, a in zip(("t", "speed", "accel_long", "jerk_lat"), arrs):
            object.__setattr__(self, k, a)

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(np.median(np.diff(self.t))) if len(self.t) > 1 else 0.0

    def __getitem__(self, sl: slice) -> "KinematicSeries":
        return KinematicSeries(self.t[sl], self.speed[sl], self.accel_long[sl], self.jerk_lat[sl])


def kinematics_from_positions(traj: Trajectory) -> KinematicSeries:
    """Differentiate (already smoothed) positions.

    Lateral acceleration is the component of the acceleration vector
    orthogonal to the velocity, signed by turning direction.
    """
    if len(traj) < 4:
        raise TooShort(f"agent {traj.agent_id!r}: need at least 4 samples")
    dt = traj.check_uniform()
    vx, vy = derivative_series(traj.x, dt, 1), derivative_series(traj.y, dt, 1)
    ax, ay = derivative_series(traj.x, dt, 2), derivative_series(traj.y, dt, 2)
    speed = np.hypot(vx, vy)
    moving = speed > _SPEED_EPS
    a_lat = np.zeros_like(speed)
    a_lat[moving] = (vx * ay - vy * ax)[moving] / speed[moving]
    return KinematicSeries(traj.t, speed, derivative_series(speed, dt, 1),
                           derivative_series(a_lat, dt, 1))


def kinematics_from_state(state: KinematicState) -> KinematicSeries:
    """EKF path: lateral acceleration is ``speed * yaw_rate``."""
    if len(state.t) < 4:
        raise TooShort("need at least 4 filtered samples")
    dt = float(np.median(np.diff(state.t)))
    speed = np.abs(state.speed)
    a_lat = state.speed * state.yaw_rate
    return KinematicSeries(state.t, speed, derivative_series(speed, dt, 1),
                           derivative_series(a_lat, dt, 1))


def kinematics_from_trajectory(source) -> KinematicSeries:
    if isinstance(source, KinematicState):
        return kinematics_from_state(source)
    return kinematics_from_positions(source)


def extract_features(ks: KinematicSeries, window: float = 5.0, unit_mode: str = "kmh") -> FeatureVector:
    """Summarise one window.

    The window's duration is counted as samples times the sampling period,
    so 50 samples at 10 Hz make a 5 s window.
    """
    if unit_mode not in ("kmh", "ms"):
        raise InvalidParameters(f"unit_mode must be 'kmh' or 'ms', got {unit_mode!r}")
    if len(ks) < 2 or len(ks) * ks.dt < window * (1 - 1e-6):
        span = len(ks) * ks.dt
        raise WindowTooShort(f"series spans {span:g} s, window needs {window:g} s")
    acc = ks.accel_long
    pos, neg = acc[acc > 0], acc[acc < 0]
    v = float(np.mean(ks.speed)) * (MS_TO_KMH if unit_mode == "kmh" else 1.0)
    return FeatureVector(
        v,
        float(pos.mean()) if pos.size else 0.0,
        float(-neg.mean()) if neg.size else 0.0,
        float(np.std(ks.jerk_lat)),
    ).validate()


def split_windows(ks: KinematicSeries, window: float = 5.0) -> list[tuple[int, KinematicSeries]]:
    """Consecutive non-overlapping windows; a trailing partial window is dropped."""
    if window <= 0:
        raise InvalidParameters("window must be positive")
    dt = ks.dt
    if dt <= 0:
        return []
    per = int(round(window / dt))
    if per < 2:
        raise InvalidParameters(f"window {window} s holds fewer than 2 samples at dt={dt:g}")
    return [(i, ks[i * per:(i + 1) * per]) for i in range(len(ks) // per)]
