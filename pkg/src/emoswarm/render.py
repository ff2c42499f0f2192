"""SVG snapshots of a logged run: arena, oriented robot squares, fading trails."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import ROBOT_RADIUS
from .engine import TrajectoryLog
from .geometry import Domain

DEFAULT_TRAILS = 5
PIXELS_PER_METER = 400.0
FADE_CHUNKS = 8


@dataclass
class Frame:
    """Geometry drawn in one snapshot."""

    step: int
    t: float
    domain: Domain
    poses: np.ndarray
    trails: dict[int, np.ndarray]


def default_trail_ids(n: int, count: int = DEFAULT_TRAILS) -> list[int]:
    """``count`` robot ids spread evenly over ``0..n-1``."""
    if count <= 0 or n == 0:
        return []
    if count >= n:
        return list(range(n))
    return sorted({int(round(x)) for x in np.linspace(0, n - 1, count)})


def _log_domain(log: TrajectoryLog) -> Domain:
    if log.domain is not None:
        return log.domain
    xy = log.poses[:, :, :2].reshape(-1, 2)
    lo, hi = xy.min(axis=0) - ROBOT_RADIUS, xy.max(axis=0) + ROBOT_RADIUS
    return Domain(lo[0], hi[0], lo[1], hi[1])


def frame_steps(n_records: int, stride: int) -> list[int]:
    if stride < 1:
        raise ValueError(f"frame stride must be >= 1, got {stride}")
    return list(range(0, n_records, stride))


def frame_data(log: TrajectoryLog, step: int, trail_ids=None) -> Frame:
    """Positions at ``step`` and the traces of ``trail_ids`` up to it."""
    if trail_ids is None:
        trail_ids = default_trail_ids(log.n_robots)
    trails = {i: log.poses[: step + 1, i, :2] for i in trail_ids}
    return Frame(step, float(log.times[step]), _log_domain(log), log.poses[step], trails)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def frame_svg(frame: Frame, scale: float = PIXELS_PER_METER) -> str:
    d = frame.domain
    pad = 10.0
    w = d.width * scale + 2 * pad
    h = d.height * scale + 2 * pad

    def px(x, y):
        return pad + (x - d.x_min) * scale, pad + (d.y_max - y) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
        f'<rect x="{_fmt(pad)}" y="{_fmt(pad)}" width="{_fmt(d.width * scale)}" '
        f'height="{_fmt(d.height * scale)}" fill="#f4f4f4" stroke="black" stroke-width="2"/>',
    ]
    for i, xy in frame.trails.items():
        if len(xy) < 2:
            continue
        # older chunks drawn fainter
        bounds = np.linspace(0, len(xy) - 1, FADE_CHUNKS + 1).astype(int)
        for c in range(FADE_CHUNKS):
            a, b = bounds[c], bounds[c + 1]
            if b <= a:
                continue
            pts = " ".join("{},{}".format(*map(_fmt, px(x, y))) for x, y in xy[a : b + 1])
            opacity = 0.15 + 0.85 * (c + 1) / FADE_CHUNKS
            out.append(
                f'<polyline class="trail" data-robot="{i}" points="{pts}" fill="none" '
                f'stroke="#1f4e9c" stroke-width="2" stroke-opacity="{opacity:.3f}"/>'
            )
    side = 2 * ROBOT_RADIUS * scale
    for i, (x, y, th) in enumerate(frame.poses):
        cx, cy = px(x, y)
        deg = -np.degrees(th)
        out.append(
            f'<g class="robot" data-robot="{i}" transform="translate({_fmt(cx)} {_fmt(cy)}) rotate({deg:.2f})">'
            f'<rect x="{_fmt(-side / 2)}" y="{_fmt(-side / 2)}" width="{_fmt(side)}" height="{_fmt(side)}" '
            f'fill="#c0392b" stroke="black" stroke-width="1"/>'
            f'<line x1="0" y1="0" x2="{_fmt(side / 2)}" y2="0" stroke="white" stroke-width="2"/></g>'
        )
    out.append(
        f'<text x="{_fmt(pad + 6)}" y="{_fmt(pad + 18)}" font-family="sans-serif" '
        f'font-size="14">t = {frame.t:.2f} s</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_frames(
    log: TrajectoryLog,
    frames_dir,
    frame_stride: int = 10,
    trail_ids=None,
    scale: float = PIXELS_PER_METER,
) -> list[Path]:
    """Write one SVG per sampled step; returns the file paths in order."""
    frames_dir = Path(frames_dir)
    frames_dir.mkdir(parents=True, exist_ok=True)
    steps = frame_steps(len(log.times), frame_stride)
    width = max(4, len(str(steps[-1])))
    paths = []
    for k in steps:
        path = frames_dir / f"frame_{k:0{width}d}.svg"
        path.write_text(frame_svg(frame_data(log, k, trail_ids), scale), encoding="utf-8")
        paths.append(path)
    return paths
