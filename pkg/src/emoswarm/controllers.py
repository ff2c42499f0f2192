"""Single-integrator control laws and their mapping onto unicycle commands."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .geometry import DEFAULT_QUADRATURE, Domain, cell_centroids, centroids, compute_voronoi, locational_cost


class UniControl(NamedTuple):
    """Linear and angular velocity; fields may be scalars or arrays."""

    v: np.ndarray | float
    omega: np.ndarray | float


@dataclass(frozen=True)
class DiffeoParams:
    """Look-ahead distance ``l`` (m) and gain ``K`` of the near-identity map.

    Small ``l`` lets the robot pivot sharply toward its goal, large ``l``
    yields wide smooth arcs; ``K`` scales the resulting speeds.
    """

    l: float
    K: float

    def __post_init__(self):
        if not (self.l > 0 and self.K > 0):
            raise ValueError(f"diffeomorphism needs l > 0 and K > 0, got l={self.l}, K={self.K}")

    def to_dict(self) -> dict:
        return asdict(self)


def goto_goal_si(p, target) -> np.ndarray:
    """Unit-gain proportional pull toward ``target``."""
    return np.asarray(target, dtype=float) - np.asarray(p, dtype=float)


def coverage_controls(
    positions,
    density,
    domain: Domain,
    kappa: float = 1.0,
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd-type pull of every robot toward its cell centroid.

    Returns the ``(N, 2)`` velocities and the centroids they point at.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    p = np.asarray(positions, dtype=float)
    _, c = centroids(p, density, domain, quadrature_resolution)
    return kappa * (c - p), c


def coverage_si(
    all_positions,
    i: int,
    density,
    domain: Domain,
    kappa: float = 1.0,
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Coverage velocity of robot ``i`` alone."""
    u, _ = coverage_controls(all_positions, density, domain, kappa, quadrature_resolution)
    return u[i]


def coverage_rollout(
    positions,
    density,
    domain: Domain,
    duration: float,
    dt: float = 0.01,
    kappa: float = 1.0,
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> dict:
    """Euler rollout of the coverage law under single-integrator motion.

    Returns a dict with ``positions`` ``(T, N, 2)``, the locational ``cost``
    at every step, and ``gaps``: the largest robot-to-centroid distance at
    every step.
    """
    p = np.array(positions, dtype=float)
    steps = int(np.ceil(duration / dt - 1e-9))
    traj, costs, gaps = [p.copy()], [], []
    for k in range(steps + 1):
        cells = compute_voronoi(p, domain)
        c = cell_centroids(cells, density, quadrature_resolution)
        costs.append(locational_cost(p, density, domain, quadrature_resolution, cells=cells))
        gaps.append(float(np.max(np.hypot(*(c - p).T))))
        if k < steps:
            p = p + dt * kappa * (c - p)
            traj.append(p.copy())
    return {"positions": np.array(traj), "cost": np.array(costs), "gaps": np.array(gaps)}


def si_to_uni(u, theta, params: DiffeoParams) -> UniControl:
    """Map a planar velocity onto (v, omega) for a robot with heading ``theta``.

    The command makes the point ``l`` ahead of the robot move with velocity
    ``K * u``.
    """
    u = np.asarray(u, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    ux, uy = u[..., 0], u[..., 1]
    return UniControl(params.K * (c * ux + s * uy), params.K / params.l * (c * uy - s * ux))


def lookahead_point(p, theta, l: float) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p + l * np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def lookahead_velocity(theta, cmd: UniControl, l: float) -> np.ndarray:
    """Velocity of the look-ahead point under unicycle kinematics."""
    c, s = np.cos(theta), np.sin(theta)
    v, w = cmd
    return np.stack([v * c - l * w * s, v * s + l * w * c], axis=-1)


def saturate(cmd: UniControl, v_max: float | None, omega_max: float | None) -> UniControl:
    """Clamp each component into its symmetric limit; ``None`` disables a limit."""
    v, w = cmd
    if v_max is not None:
        if not v_max > 0:
            raise ValueError(f"v_max must be positive, got {v_max}")
        v = np.clip(v, -v_max, v_max)
    if omega_max is not None:
        if not omega_max > 0:
            raise ValueError(f"omega_max must be positive, got {omega_max}")
        w = np.clip(w, -omega_max, omega_max)
    if np.ndim(v) == 0:
        v, w = float(v), float(w)
    return UniControl(v, w)
