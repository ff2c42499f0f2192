"""Measurable stand-ins for the movement attributes (speed, angularity)."""

from __future__ import annotations

import numpy as np

from .engine import TrajectoryLog

# Arc-length spacing used to cut a trace into segments.
MIN_SEGMENT = 1e-4


class TooShort(ValueError):
    pass


def _positions(log_or_xy, robot_id: int | None) -> np.ndarray:
    if isinstance(log_or_xy, TrajectoryLog):
        return log_or_xy.robot(robot_id)
    return np.asarray(log_or_xy, dtype=float)


def turning_angles(xy: np.ndarray, min_segment: float = 0.0) -> np.ndarray:
    """Absolute heading change between consecutive segments of a polyline.

    Segments no longer than ``min_segment`` are dropped first.
    """
    d = np.diff(np.asarray(xy, dtype=float), axis=0)
    d = d[np.hypot(d[:, 0], d[:, 1]) > min_segment]
    if len(d) < 2:
        return np.zeros(0)
    a, b = d[:-1], d[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = (a * b).sum(axis=1)
    return np.abs(np.arctan2(cross, dot))


def resample_by_arclength(xy: np.ndarray, spacing: float) -> np.ndarray:
    """Points every ``spacing`` meters along the polyline (linear interpolation)."""
    xy = np.asarray(xy, dtype=float)
    seg = np.hypot(*np.diff(xy, axis=0).T)
    keep = np.concatenate([[True], seg > 0])
    xy, s = xy[keep], np.concatenate([[0.0], np.cumsum(seg[seg > 0])])
    if s[-1] < spacing:
        return xy[:1]
    g = np.arange(0.0, s[-1] + 0.5 * spacing, spacing)
    g = g[g <= s[-1]]
    return np.column_stack([np.interp(g, s, xy[:, 0]), np.interp(g, s, xy[:, 1])])


def trace_angularity(log, robot_id: int | None = None, spacing: float = MIN_SEGMENT) -> float:
    """Mean absolute turning angle (rad) between consecutive trace segments.

    The trace is cut into equal ``spacing``-long pieces along its arc length
    before measuring, so the number reflects the shape of the path rather
    than how fast or how often it was sampled. A straight line gives 0.

    ``log`` is a :class:`TrajectoryLog` (with ``robot_id``) or a ``(T, 2)``
    array of positions.
    """
    xy = _positions(log, robot_id)
    if len(xy) < 3:
        raise TooShort(f"need at least 3 records, got {len(xy)}")
    turns = turning_angles(resample_by_arclength(xy, spacing))
    return float(turns.mean()) if len(turns) else 0.0


def trace_stats(log, robot_id: int | None = None, dt: float | None = None) -> dict:
    """Path length, net displacement, mean and peak speed of one robot.

    Speeds come from the logged positions, so they reflect motion actually
    realized after saturation and domain clamping.
    """
    xy = _positions(log, robot_id)
    if isinstance(log, TrajectoryLog):
        dt = float(np.diff(log.times).mean()) if len(log.times) > 1 else dt
    if len(xy) < 2:
        raise TooShort(f"need at least 2 records, got {len(xy)}")
    if dt is None or not dt > 0:
        raise ValueError("a positive dt is required for position arrays")
    seg = np.hypot(*np.diff(xy, axis=0).T)
    path = float(seg.sum())
    duration = dt * len(seg)
    return {
        "path_length": path,
        "net_displacement": float(np.hypot(*(xy[-1] - xy[0]))),
        "mean_speed": path / duration,
        "peak_speed": float(seg.max() / dt),
    }


def swarm_metrics(log: TrajectoryLog) -> list[dict]:
    """One row per robot plus a final ``robot_id="all"`` aggregate row.

    The aggregate averages path length, displacement, mean speed and
    angularity over robots and takes the maximum of peak speed.
    """
    rows = []
    for i in range(log.n_robots):
        row = {"robot_id": i, **trace_stats(log, i)}
        row["angularity"] = trace_angularity(log, i) if len(log.times) >= 3 else 0.0
        rows.append(row)
    agg = {"robot_id": "all"}
    for key in ("path_length", "net_displacement", "mean_speed", "angularity"):
        agg[key] = float(np.mean([r[key] for r in rows]))
    agg["peak_speed"] = float(max(r["peak_speed"] for r in rows))
    rows.append(agg)
    return rows
