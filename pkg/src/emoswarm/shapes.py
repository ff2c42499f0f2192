"""Closed contours tracked by the happiness, surprise and sadness behaviors.

Each robot chases a point that slides along a contour; the point's angle
advances at ``phase_rate`` and is kept wrapped into [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

CONTOUR_KINDS = ("happiness", "surprise", "sadness")

TWO_PI = 2.0 * math.pi


class WrongKind(ValueError):
    pass


@dataclass(frozen=True)
class ContourParams:
    """Contour geometry and the speed of the tracked point.

    Happiness reads ``R``, ``A`` and ``f``; surprise reads ``R_min``,
    ``R_max`` and ``expansion_rate``; sadness reads ``R``. The other fields
    are carried along but ignored. ``expansion_rate`` defaults to a full
    ``R_min -> R_max`` sweep every 10 s.
    """

    kind: str
    R: float = 1.0
    A: float = 0.0
    f: int = 6
    R_min: float = 0.1
    R_max: float = 1.0
    phase_rate: float = 1.0
    expansion_rate: float | None = None
    center: tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        if self.kind not in CONTOUR_KINDS:
            raise WrongKind(f"unknown contour kind {self.kind!r}; expected one of {CONTOUR_KINDS}")
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not self.A >= 0:
            raise ValueError(f"A must be nonnegative, got {self.A}")
        if int(self.f) != self.f or self.f < 1:
            raise ValueError(f"f must be a positive integer, got {self.f}")
        if not (0 < self.R_min < self.R_max):
            raise ValueError(f"need 0 < R_min < R_max, got {self.R_min}, {self.R_max}")
        if not self.phase_rate > 0:
            raise ValueError(f"phase_rate must be positive, got {self.phase_rate}")
        object.__setattr__(self, "f", int(self.f))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.expansion_rate is None:
            object.__setattr__(self, "expansion_rate", (self.R_max - self.R_min) / 10.0)
        elif not self.expansion_rate > 0:
            raise ValueError(f"expansion_rate must be positive, got {self.expansion_rate}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["center"] = list(self.center)
        return d


def _require(params: ContourParams, kind: str):
    if params.kind != kind:
        raise WrongKind(f"expected {kind} parameters, got {params.kind}")


def _on_circle(radius, theta, center):
    return np.stack(
        [center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)], axis=-1
    )


def happiness_contour(theta, params: ContourParams) -> np.ndarray:
    """Circle of radius R rippled by ``A sin(f theta)`` in the radial direction."""
    _require(params, "happiness")
    theta = np.asarray(theta, dtype=float)
    return _on_circle(params.R + params.A * np.sin(params.f * theta), theta, params.center)


def surprise_radius(t, params: ContourParams):
    """Sawtooth radius: grows linearly from R_min and snaps back at R_max."""
    span = params.R_max - params.R_min
    return np.mod(params.expansion_rate * np.asarray(t, dtype=float), span) + params.R_min


def surprise_contour(theta, t, params: ContourParams) -> np.ndarray:
    """Circle whose radius expands with time (see :func:`surprise_radius`)."""
    _require(params, "surprise")
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be nonnegative")
    return _on_circle(surprise_radius(t, params), np.asarray(theta, dtype=float), params.center)


def sadness_contour(theta, params: ContourParams) -> np.ndarray:
    _require(params, "sadness")
    return _on_circle(params.R, np.asarray(theta, dtype=float), params.center)


def contour_point(theta, t, params: ContourParams) -> np.ndarray:
    """Dispatch on ``params.kind``."""
    if params.kind == "happiness":
        return happiness_contour(theta, params)
    if params.kind == "surprise":
        return surprise_contour(theta, t, params)
    return sadness_contour(theta, params)


def contour_velocity(theta, t, params: ContourParams) -> np.ndarray:
    """Time derivative of the tracked point, for initial heading alignment."""
    theta = np.asarray(theta, dtype=float)
    w = params.phase_rate
    radial = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    tangent = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    if params.kind == "happiness":
        rho = params.R + params.A * np.sin(params.f * theta)
        drho = params.A * params.f * np.cos(params.f * theta)
        return w * (drho[..., None] * radial + rho[..., None] * tangent)
    if params.kind == "surprise":
        rho = surprise_radius(t, params)
        return params.expansion_rate * radial + w * rho[..., None] * tangent
    return w * params.R * tangent


def wrap_angle(a):
    """Map angles into [-pi, pi).

    Same value as ``atan2(sin a, cos a)`` with pi sent to -pi, but reduced by
    whole turns, so odd multiples of pi land on -pi despite rounding in sin.
    """
    a = np.asarray(a, dtype=float)
    a = a - TWO_PI * np.floor((a + math.pi) / TWO_PI)
    a = np.where(a >= math.pi, a - TWO_PI, a)
    a = np.where(a < -math.pi, a + TWO_PI, a)
    return float(a) if np.ndim(a) == 0 else a


def wrap_phase(t, theta0, phase_rate: float = 1.0):
    """Phase of the tracked point at time ``t``, wrapped into [-pi, pi)."""
    return wrap_angle(phase_rate * np.asarray(t, dtype=float) + np.asarray(theta0, dtype=float))


def initial_phases(n: int) -> np.ndarray:
    """Phases 2*pi*i/N for i = 1..N, wrapped."""
    if n < 1:
        raise ValueError(f"need at least one robot, got {n}")
    return np.asarray(wrap_angle(TWO_PI * np.arange(1, n + 1) / n)).reshape(n)


def initial_placement_contour(n: int, params: ContourParams, t0: float = 0.0):
    """Equally spaced starting points on the contour.

    Returns
    -------
    positions : (N, 2) ndarray
    phases : (N,) ndarray
    """
    phases = initial_phases(n)
    return contour_point(phases, t0, params), phases


def default_contour(kind: str, domain, phase_rate: float | None = None) -> ContourParams:
    """Contour sized relative to the smaller domain side and centered on it.

    Happiness is a big rippled circle, surprise sweeps out to a very big one,
    sadness is a small circle traversed slowly.
    """
    ref = domain.min_side
    center = tuple(domain.center)
    if kind == "happiness":
        p = dict(R=0.35 * ref, A=0.05 * ref, f=6, phase_rate=1.0)
    elif kind == "surprise":
        p = dict(R=0.25 * ref, R_min=0.1 * ref, R_max=0.45 * ref, phase_rate=1.0)
    elif kind == "sadness":
        p = dict(R=0.1 * ref, phase_rate=math.pi / 32)
    else:
        raise WrongKind(f"no contour for {kind!r}")
    if phase_rate is not None:
        p["phase_rate"] = phase_rate
    return ContourParams(kind=kind, center=center, **p)
