"""Unicycle kinematics, integrated with explicit Euler."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .controllers import UniControl
from .geometry import Domain
from .shapes import wrap_angle

# Half of a 10 cm x 10 cm robot footprint.
ROBOT_RADIUS = 0.05
MAX_DT = 0.1


class BadTimestep(ValueError):
    pass


class Pose(NamedTuple):
    x: float | np.ndarray
    y: float | np.ndarray
    theta: float | np.ndarray


def check_dt(dt: float) -> float:
    if not (0 < dt <= MAX_DT):
        raise BadTimestep(f"dt must lie in (0, {MAX_DT}], got {dt}")
    return float(dt)


def step_unicycle(pose: Pose, cmd: UniControl, dt: float) -> Pose:
    x, y, th = pose
    v, w = cmd
    check_dt(dt)
    return Pose(x + v * np.cos(th) * dt, y + v * np.sin(th) * dt, wrap_angle(th + w * dt))


def step_unicycle_array(poses: np.ndarray, v, omega, dt: float) -> np.ndarray:
    """Euler step for an ``(N, 3)`` array of ``[x, y, theta]`` rows."""
    check_dt(dt)
    th = poses[:, 2]
    out = np.empty_like(poses)
    out[:, 0] = poses[:, 0] + v * np.cos(th) * dt
    out[:, 1] = poses[:, 1] + v * np.sin(th) * dt
    out[:, 2] = wrap_angle(th + omega * dt)
    return out


def clamp_to_domain(pose: Pose, domain: Domain, margin: float = ROBOT_RADIUS) -> Pose:
    """Keep the robot center at least ``margin`` away from every edge."""
    x = np.clip(pose.x, domain.x_min + margin, domain.x_max - margin)
    y = np.clip(pose.y, domain.y_min + margin, domain.y_max - margin)
    if np.ndim(x) == 0:
        x, y = float(x), float(y)
    return Pose(x, y, pose.theta)


def clamp_array(poses: np.ndarray, domain: Domain, margin: float = ROBOT_RADIUS) -> np.ndarray:
    out = poses.copy()
    out[:, 0] = np.clip(out[:, 0], domain.x_min + margin, domain.x_max - margin)
    out[:, 1] = np.clip(out[:, 1], domain.y_min + margin, domain.y_max - margin)
    return out
