"""Trajectory noise reduction and finite-difference derivatives.

Two smoothers are provided: a Savitzky-Golay filter applied to each
position axis, and an extended Kalman filter over a constant turn rate and
velocity (CTRV) motion model that observes positions only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.signal import savgol_filter

from .errors import DataError, DegenerateCovariance, InvalidParameters, NonUniformSampling, TooShort

UNIFORM_TOL = 0.01


@dataclass(frozen=True)
class Trajectory:
    """Timestamped planar positions of one agent (seconds, meters)."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    agent_id: str = ""

    def __post_init__(self):
        for name in ("t", "x", "y"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.t.shape == self.x.shape == self.y.shape) or self.t.ndim != 1:
            raise DataError(f"agent {self.agent_id!r}: t, x, y lengths differ")
        if len(self.t) < 2:
            raise TooShort(f"agent {self.agent_id!r}: need at least 2 samples")
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.x))
                and np.all(np.isfinite(self.y))):
            raise DataError(f"agent {self.agent_id!r}: non-finite samples")
        if np.any(np.diff(self.t) <= 0):
            raise DataError(f"agent {self.agent_id!r}: timestamps not strictly increasing")

    def __len__(self):
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(np.median(np.diff(self.t)))

    def check_uniform(self, tol: float = UNIFORM_TOL) -> float:
        dt = self.dt
        if np.max(np.abs(np.diff(self.t) - dt)) > tol * dt:
            raise NonUniformSampling(f"agent {self.agent_id!r}: sampling deviates more than "
                                     f"{tol:.0%} from {dt:g} s")
        return dt

    def reversed(self) -> "Trajectory":
        return Trajectory(self.t[-1] + self.t[0] - self.t[::-1], self.x[::-1], self.y[::-1],
                          self.agent_id)

    def rotated(self, angle: float) -> "Trajectory":
        c, s = np.cos(angle), np.sin(angle)
        return Trajectory(self.t, c * self.x - s * self.y, s * self.x + c * self.y, self.agent_id)


@dataclass(frozen=True)
class SgConfig:
    poly_degree: int = 3
    window_len: int = 11

    def __post_init__(self):
        if self.poly_degree < 0 or self.window_len % 2 != 1 or self.window_len <= self.poly_degree:
            raise InvalidParameters(
                f"Savitzky-Golay needs an odd window longer than the degree, got "
                f"window={self.window_len}, degree={self.poly_degree}")


@dataclass(frozen=True)
class EkfConfig:
    accel_std: float = 3.0          # m/s^2, longitudinal process noise
    yaw_accel_std: float = 1.0      # rad/s^2, yaw process noise
    position_std: float = 0.1       # m, measurement noise
    initial_cov: float = 1.0        # scale of the initial diagonal covariance

    def __post_init__(self):
        if min(self.accel_std, self.yaw_accel_std, self.position_std, self.initial_cov) <= 0:
            raise InvalidParameters("EKF noise parameters must be positive")


def sg_smooth(traj: Trajectory, cfg: SgConfig = SgConfig()) -> Trajectory:
    """Least-squares local polynomial smoothing of each position axis.

    Edge samples take their value from the polynomial fitted to the first
    (last) full window, so the output keeps the input length.
    """
    traj.check_uniform()
    if len(traj) < cfg.window_len:
        raise TooShort(f"agent {traj.agent_id!r}: {len(traj)} samples < window {cfg.window_len}")
    smooth = [savgol_filter(v, cfg.window_len, cfg.poly_degree, mode="interp") for v in (traj.x, traj.y)]
    return Trajectory(traj.t, smooth[0], smooth[1], traj.agent_id)


@dataclass(frozen=True)
class KinematicState:
    """Filtered CTRV state per timestamp."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    speed: np.ndarray
    yaw_rate: np.ndarray
    cov_trace: np.ndarray = field(repr=False)


def _ctrv_predict(s: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Propagate the state and return the motion Jacobian."""
    px, py, th, v, w = s
    F = np.eye(5)
    if abs(w) > 1e-6:
        th2 = th + w * dt
        sn, cs, sn2, cs2 = np.sin(th), np.cos(th), np.sin(th2), np.cos(th2)
        nxt = np.array([px + v / w * (sn2 - sn), py + v / w * (cs - cs2), th2, v, w])
        F[0, 2] = v / w * (cs2 - cs)
        F[0, 3] = (sn2 - sn) / w
        F[0, 4] = v * dt * cs2 / w - v / w ** 2 * (sn2 - sn)
        F[1, 2] = v / w * (sn2 - sn)
        F[1, 3] = (cs - cs2) / w
        F[1, 4] = v * dt * sn2 / w - v / w ** 2 * (cs - cs2)
    else:
        sn, cs = np.sin(th), np.cos(th)
        nxt = np.array([px + v * cs * dt, py + v * sn * dt, th + w * dt, v, w])
        F[0, 2] = -v * sn * dt
        F[0, 3] = cs * dt
        F[0, 4] = -0.5 * v * sn * dt ** 2
        F[1, 2] = v * cs * dt
        F[1, 3] = sn * dt
        F[1, 4] = 0.5 * v * cs * dt ** 2
    F[2, 4] = dt
    return nxt, F


def _process_noise(th: float, dt: float, cfg: EkfConfig) -> np.ndarray:
    G = np.array([
        [0.5 * dt ** 2 * np.cos(th), 0.0],
        [0.5 * dt ** 2 * np.sin(th), 0.0],
        [0.0, 0.5 * dt ** 2],
        [dt, 0.0],
        [0.0, dt],
    ])
    return G @ np.diag([cfg.accel_std ** 2, cfg.yaw_accel_std ** 2]) @ G.T


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def ekf_smooth(traj: Trajectory, cfg: EkfConfig = EkfConfig()) -> KinematicState:
    """Forward EKF pass over positions with a CTRV model.

    State is ``(x, y, heading, speed, yaw_rate)``. Initial position comes
    from the first sample, heading and speed from the first finite
    difference.
    """
    n = len(traj)
    if n < 5:
        raise TooShort(f"agent {traj.agent_id!r}: EKF needs at least 5 samples")
    dx, dy = traj.x[1] - traj.x[0], traj.y[1] - traj.y[0]
    dt0 = traj.t[1] - traj.t[0]
    s = np.array([traj.x[0], traj.y[0], np.arctan2(dy, dx), np.hypot(dx, dy) / dt0, 0.0])
    P = np.eye(5) * cfg.initial_cov
    H = np.zeros((2, 5))
    H[0, 0] = H[1, 1] = 1.0
    R = np.eye(2) * cfg.position_std ** 2
    I5 = np.eye(5)

    out = np.zeros((n, 5))
    trace = np.zeros(n)
    for k in range(n):
        if k > 0:
            dt = traj.t[k] - traj.t[k - 1]
            s, F = _ctrv_predict(s, dt)
            P = F @ P @ F.T + _process_noise(s[2], dt, cfg)
        innov = np.array([traj.x[k], traj.y[k]]) - H @ s
        S = H @ P @ H.T + R
        K = np.linalg.solve(S, H @ P).T
        s = s + K @ innov
        s[2] = _wrap(s[2])
        A = I5 - K @ H
        P = A @ P @ A.T + K @ R @ K.T
        P = 0.5 * (P + P.T)
        try:
            np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            raise DegenerateCovariance(
                f"agent {traj.agent_id!r}: covariance lost positive definiteness at sample {k}"
            ) from None
        out[k] = s
        trace[k] = np.trace(P)
    return KinematicState(traj.t.copy(), out[:, 0], out[:, 1], out[:, 2], out[:, 3], out[:, 4], trace)


_CENTRAL = {
    1: (np.array([-0.5, 0.0, 0.5]), 1),
    2: (np.array([1.0, -2.0, 1.0]), 1),
    3: (np.array([-0.5, 1.0, 0.0, -1.0, 0.5]), 2),
}


def _stencil(offsets: np.ndarray, order: int) -> np.ndarray:
    """Weights w with sum(w * f(i + o)) = f^(order)(i) exactly for polynomials
    of degree below ``len(offsets)``."""
    m = np.arange(len(offsets))
    A = offsets[None, :] ** m[:, None] / np.array([factorial(k) for k in m])[:, None]
    rhs = (m == order).astype(float)
    return np.linalg.solve(A, rhs)


def derivative_series(values, dt: float, order: int) -> np.ndarray:
    """Finite-difference derivative of a uniformly sampled series.

    Central stencils where they fit. Edge samples use a one-sided stencil
    over the ``order + 2`` samples nearest the edge (second-order accurate),
    or ``order + 1`` samples when the series is that short.
    """
    v = np.asarray(values, dtype=float)
    if order not in _CENTRAL:
        raise InvalidParameters(f"derivative order must be 1, 2 or 3, got {order}")
    n = len(v)
    if n <= order:
        raise TooShort(f"{n} samples cannot support a derivative of order {order}")
    weights, half = _CENTRAL[order]
    out = np.empty(n)
    interior = np.zeros(n, dtype=bool)
    if n > 2 * half:
        out[half:n - half] = np.convolve(v, weights[::-1], mode="valid")
        interior[half:n - half] = True
    width = min(order + 2, n)
    for i in np.flatnonzero(~interior):
        start = 0 if i < n / 2 else n - width
        offsets = np.arange(start, start + width, dtype=float) - i
        out[i] = _stencil(offsets, order) @ v[start:start + width]
    return out / dt ** order
