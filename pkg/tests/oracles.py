"""Independent reference computations shared by several test modules."""

import numpy as np

from emoswarm.controllers import UniControl, lookahead_point
from emoswarm.dynamics import Pose, step_unicycle


def lookahead_fd_velocity(pose: Pose, cmd: UniControl, l: float, dt: float = 1e-4) -> np.ndarray:
    """Central difference of the look-ahead point over one forward and one backward Euler step."""
    fwd = step_unicycle(pose, cmd, dt)
    bwd = step_unicycle(pose, UniControl(-cmd.v, -cmd.omega), dt)
    a = lookahead_point([fwd.x, fwd.y], fwd.theta, l)
    b = lookahead_point([bwd.x, bwd.y], bwd.theta, l)
    return (a - b) / (2 * dt)


def circle_closure_error(dt: float) -> float:
    """Distance from start after driving v = 1, omega = 1 for 2 pi seconds."""
    steps = int(round(2 * np.pi / dt))
    pose = Pose(0.0, 0.0, 0.0)
    cmd = UniControl(1.0, 1.0)
    for _ in range(steps):
        pose = step_unicycle(pose, cmd, dt)
    # land exactly on t = 2 pi
    rest = 2 * np.pi - steps * dt
    if rest > 1e-15:
        pose = step_unicycle(pose, cmd, rest)
    return float(np.hypot(pose.x, pose.y))


def circle_trajectory_error(dt: float) -> float:
    """Largest distance between the Euler rollout and exact circular motion over one lap.

    Exact solution from (0, 0, 0) with v = omega = 1: (sin t, 1 - cos t).
    """
    steps = int(round(2 * np.pi / dt))
    pose = Pose(0.0, 0.0, 0.0)
    cmd = UniControl(1.0, 1.0)
    worst = 0.0
    for k in range(1, steps + 1):
        pose = step_unicycle(pose, cmd, dt)
        t = k * dt
        worst = max(worst, float(np.hypot(pose.x - np.sin(t), pose.y - (1 - np.cos(t)))))
    return worst


def double_buffered_step(poses, spec, domain, t, dt, phase0=None):
    """Reference step: every robot's command comes from a frozen copy of the swarm."""
    from emoswarm.controllers import coverage_si, goto_goal_si, saturate, si_to_uni
    from emoswarm.dynamics import clamp_to_domain
    from emoswarm.shapes import contour_point, wrap_phase

    frozen = np.array(poses, dtype=float, copy=True)
    out = np.empty_like(frozen)
    for i in range(len(frozen)):
        x, y, th = frozen[i]
        if spec.is_contour:
            goal = contour_point(wrap_phase(t, phase0[i], spec.phase_rate), t, spec.contour)
            u = goto_goal_si(frozen[i, :2], goal)
        else:
            u = coverage_si(frozen[:, :2], i, spec.density, domain, spec.kappa, spec.quadrature_resolution)
        cmd = saturate(si_to_uni(u, th, spec.diffeo), spec.v_max, spec.omega_max)
        nxt = clamp_to_domain(step_unicycle(Pose(x, y, th), UniControl(float(cmd.v), float(cmd.omega)), dt), domain)
        out[i] = [nxt.x, nxt.y, nxt.theta]
    return out
