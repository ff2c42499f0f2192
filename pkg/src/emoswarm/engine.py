"""Behavior registry, synchronous simulation loop and trajectory logging."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .controllers import DiffeoParams, UniControl, coverage_controls, goto_goal_si, saturate, si_to_uni
from .densities import DensityField
from .dynamics import ROBOT_RADIUS, check_dt, clamp_array, step_unicycle_array
from .geometry import DEFAULT_QUADRATURE, Domain
from .shapes import (
    ContourParams,
    contour_point,
    contour_velocity,
    default_contour,
    initial_placement_contour,
    wrap_angle,
    wrap_phase,
)

EMOTIONS = ("happiness", "surprise", "sadness", "fear", "disgust", "anger")
CONTOUR_EMOTIONS = ("happiness", "surprise", "sadness")
COVERAGE_EMOTIONS = ("fear", "disgust", "anger")

# Swarm behavior and robot control attributes per emotion.
BEHAVIOR_TABLE = {
    "happiness": ("sinusoid over circle", ("fast", "smooth")),
    "surprise": ("expanding circle", ("fast", "smooth")),
    "sadness": ("small circle", ("very slow", "smooth")),
    "fear": ("uniform coverage", ("slow", "angular")),
    "disgust": ("coverage on boundaries", ("slow", "angular")),
    "anger": ("coverage on center", ("fast", "angular")),
}

COVERAGE_DENSITY = {"fear": "uniform", "disgust": "boundary", "anger": "gaussian_center"}

# Look-ahead distance as a fraction of the smaller domain side.
TRACE_L = {"smooth": 0.05, "angular": 0.02}
# Diffeomorphism gain. Contour followers need a stiff gain to stay on a moving
# target (the go-to-goal law lags by about phase_rate / K); their perceived
# speed comes from phase_rate instead.
CONTOUR_K = {"fast": 60.0, "very slow": 8.0}
COVERAGE_K = {"fast": 2.0, "slow": 0.5}

DEFAULT_DURATION = {
    "happiness": 4.0,
    "surprise": 4.0,
    "anger": 6.0,
    "sadness": 8.0,
    "disgust": 12.0,
    "fear": 15.0,
}

DEFAULT_DT = 0.01
V_MAX_PER_SIDE = 1.0
DEFAULT_OMEGA_MAX = 4.0 * math.pi
MAX_PLACEMENT_ATTEMPTS = 100_000


class PlacementFailure(RuntimeError):
    pass


class SpecError(ValueError):
    """Invalid behavior configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class BehaviorSpec:
    """Everything needed to reproduce one expressive behavior."""

    emotion: str
    diffeo: DiffeoParams
    contour: ContourParams | None = None
    density: DensityField | None = None
    kappa: float = 1.0
    v_max: float | None = None
    omega_max: float | None = None
    quadrature_resolution: int = DEFAULT_QUADRATURE

    def __post_init__(self):
        if self.emotion not in EMOTIONS:
            raise SpecError("emotion", f"unknown emotion {self.emotion!r}; valid: {', '.join(EMOTIONS)}")
        if self.emotion in CONTOUR_EMOTIONS:
            if self.contour is None or self.density is not None:
                raise SpecError("contour", f"{self.emotion} needs a contour and no density")
            if self.contour.kind != self.emotion:
                raise SpecError("contour.kind", f"{self.contour.kind} contour for {self.emotion}")
        elif self.density is None or self.contour is not None:
            raise SpecError("density", f"{self.emotion} needs a density and no contour")
        if not self.kappa > 0:
            raise SpecError("kappa", f"must be positive, got {self.kappa}")
        for name in ("v_max", "omega_max"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise SpecError(name, f"must be positive or unset, got {val}")
        if int(self.quadrature_resolution) != self.quadrature_resolution or self.quadrature_resolution < 1:
            raise SpecError("quadrature_resolution", "must be a positive integer")

    @property
    def is_contour(self) -> bool:
        return self.contour is not None

    @property
    def limits(self) -> tuple[float | None, float | None]:
        return self.v_max, self.omega_max

    @property
    def phase_rate(self) -> float | None:
        return self.contour.phase_rate if self.contour else None

    def without_saturation(self) -> "BehaviorSpec":
        return dataclasses.replace(self, v_max=None, omega_max=None)

    def to_dict(self) -> dict:
        return {
            "emotion": self.emotion,
            "diffeo": self.diffeo.to_dict(),
            "contour": self.contour.to_dict() if self.contour else None,
            "density": self.density.to_dict() if self.density else None,
            "kappa": self.kappa,
            "v_max": self.v_max,
            "omega_max": self.omega_max,
            "quadrature_resolution": self.quadrature_resolution,
        }

    @classmethod
    def from_dict(cls, d: dict, domain: Domain) -> "BehaviorSpec":
        contour = None
        if d.get("contour"):
            c = dict(d["contour"])
            c["center"] = tuple(c["center"])
            contour = ContourParams(**c)
        density = None
        if d.get("density"):
            dd = dict(d["density"])
            density = DensityField(dd.pop("kind"), domain, dd)
        return cls(
            emotion=d["emotion"],
            diffeo=DiffeoParams(**d["diffeo"]),
            contour=contour,
            density=density,
            kappa=d["kappa"],
            v_max=d["v_max"],
            omega_max=d["omega_max"],
            quadrature_resolution=d["quadrature_resolution"],
        )


def default_spec(emotion: str, domain: Domain) -> BehaviorSpec:
    """Registry entry for ``emotion`` scaled to ``domain``."""
    if emotion not in EMOTIONS:
        raise SpecError("emotion", f"unknown emotion {emotion!r}; valid: {', '.join(EMOTIONS)}")
    _, (speed, trace) = BEHAVIOR_TABLE[emotion]
    ref = domain.min_side
    l = TRACE_L[trace] * ref
    common = dict(v_max=V_MAX_PER_SIDE * ref, omega_max=DEFAULT_OMEGA_MAX)
    if emotion in CONTOUR_EMOTIONS:
        return BehaviorSpec(
            emotion,
            DiffeoParams(l=l, K=CONTOUR_K[speed]),
            contour=default_contour(emotion, domain),
            **common,
        )
    return BehaviorSpec(
        emotion,
        DiffeoParams(l=l, K=COVERAGE_K[speed]),
        density=DensityField(COVERAGE_DENSITY[emotion], domain),
        **common,
    )


def _coerce(value, current, name: str, key: str | None = None):
    """Parse ``value`` like ``current``; errors name the dotted ``key``."""
    key = key or name
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("none", "null", "off"):
            if current is None or name in ("v_max", "omega_max"):
                return None
            raise SpecError(key, "cannot be unset")
        if isinstance(current, bool):
            raise SpecError(key, "boolean fields are not configurable")
        if isinstance(current, int) or name in ("f", "quadrature_resolution"):
            try:
                return int(text)
            except ValueError:
                raise SpecError(key, f"expected an integer, got {value!r}") from None
        try:
            return float(text)
        except ValueError:
            raise SpecError(key, f"expected a number, got {value!r}") from None
    return value


def apply_overrides(spec: BehaviorSpec, overrides: dict, domain: Domain) -> BehaviorSpec:
    """Return ``spec`` with dotted ``key=value`` overrides applied.

    Keys are ``kappa``, ``v_max``, ``omega_max``, ``quadrature_resolution``,
    ``diffeo.l``/``diffeo.K``, ``contour.<field>`` or ``density.<param>``.
    """
    d = spec.to_dict()
    for key, raw in overrides.items():
        parts = key.split(".")
        if len(parts) == 1:
            if parts[0] not in ("kappa", "v_max", "omega_max", "quadrature_resolution"):
                raise SpecError(key, "unknown parameter")
            d[parts[0]] = _coerce(raw, d[parts[0]], parts[0], key)
        elif len(parts) == 2 and parts[0] in ("diffeo", "contour", "density"):
            group, name = parts
            sub = d[group]
            if sub is None:
                raise SpecError(key, f"{spec.emotion} has no {group} parameters")
            if name in ("kind", "center") or (name not in sub and group != "density"):
                raise SpecError(key, "unknown or fixed parameter")
            if group == "density":
                allowed = {"gaussian_center": ("sigma",), "boundary": ("margin", "floor")}
                if name not in allowed.get(sub["kind"], ()):
                    raise SpecError(key, f"not a parameter of the {sub['kind']} density")
            sub[name] = _coerce(raw, sub.get(name), name, key)
        else:
            raise SpecError(key, "unknown parameter")
    try:
        return BehaviorSpec.from_dict(d, domain)
    except SpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecError(",".join(overrides) or "spec", str(exc)) from exc


@dataclass
class SwarmState:
    """Poses ``(N, 3)`` as ``[x, y, theta]`` rows plus contour phase offsets."""

    k: int
    dt: float
    poses: np.ndarray
    domain: Domain
    phase0: np.ndarray | None = None
    rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def t(self) -> float:
        return self.k * self.dt

    @property
    def n(self) -> int:
        return len(self.poses)

    @property
    def positions(self) -> np.ndarray:
        return self.poses[:, :2]

    def phases(self, phase_rate: float) -> np.ndarray | None:
        if self.phase0 is None:
            return None
        return wrap_phase(self.t, self.phase0, phase_rate)


def _random_positions(n: int, domain: Domain, rng: np.random.Generator, min_sep: float) -> np.ndarray:
    lo = np.array([domain.x_min, domain.y_min]) + ROBOT_RADIUS
    hi = np.array([domain.x_max, domain.y_max]) - ROBOT_RADIUS
    pts = []
    attempts = 0
    while len(pts) < n:
        if attempts >= MAX_PLACEMENT_ATTEMPTS:
            raise PlacementFailure(f"placed only {len(pts)} of {n} robots after {attempts} attempts")
        attempts += 1
        q = lo + rng.random(2) * (hi - lo)
        if all(math.dist(q, p) >= min_sep for p in pts):
            pts.append(q)
    return np.array(pts)


def init_behavior(spec: BehaviorSpec, n: int, domain: Domain, seed: int, dt: float = DEFAULT_DT) -> SwarmState:
    """Initial swarm: on the contour (tangent headings) or randomly scattered."""
    if n < 1:
        raise ValueError(f"need at least one robot, got {n}")
    check_dt(dt)
    rng = np.random.default_rng(seed)
    if spec.is_contour:
        pos, phases = initial_placement_contour(n, spec.contour, 0.0)
        vel = contour_velocity(phases, 0.0, spec.contour)
        heading = np.arctan2(vel[:, 1], vel[:, 0])
        poses = np.column_stack([pos, wrap_angle(heading)])
        return SwarmState(0, dt, poses, domain, phase0=phases, rng=rng)
    pos = _random_positions(n, domain, rng, 2 * ROBOT_RADIUS)
    heading = rng.uniform(-math.pi, math.pi, size=n)
    return SwarmState(0, dt, np.column_stack([pos, wrap_angle(heading)]), domain, rng=rng)


def targets(state: SwarmState, spec: BehaviorSpec) -> np.ndarray:
    """Goal point of each robot at the current instant."""
    if spec.is_contour:
        return contour_point(state.phases(spec.phase_rate), state.t, spec.contour)
    _, c = coverage_controls(state.positions, spec.density, state.domain, spec.kappa, spec.quadrature_resolution)
    return c


def commands(state: SwarmState, spec: BehaviorSpec) -> tuple[UniControl, np.ndarray]:
    """Saturated unicycle commands for every robot, all from the same snapshot."""
    p = state.positions
    if spec.is_contour:
        goal = targets(state, spec)
        u = goto_goal_si(p, goal)
    else:
        u, goal = coverage_controls(p, spec.density, state.domain, spec.kappa, spec.quadrature_resolution)
    cmd = si_to_uni(u, state.poses[:, 2], spec.diffeo)
    return saturate(cmd, spec.v_max, spec.omega_max), goal


def integrate(state: SwarmState, cmd: UniControl) -> SwarmState:
    poses = step_unicycle_array(state.poses, cmd.v, cmd.omega, state.dt)
    poses = clamp_array(poses, state.domain)
    return dataclasses.replace(state, k=state.k + 1, poses=poses)


def step(state: SwarmState, spec: BehaviorSpec) -> SwarmState:
    """Advance every robot by one ``state.dt`` from the pre-step snapshot."""
    cmd, _ = commands(state, spec)
    return integrate(state, cmd)


def n_steps(duration: float, dt: float) -> int:
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration}")
    # guard against 1/0.01 = 100.00000000000001
    return int(math.ceil(duration / dt - 1e-9))


@dataclass
class TrajectoryLog:
    """Per-step poses and commands of a whole run.

    ``poses`` is ``(T, N, 3)``, ``cmds`` is ``(T, N, 2)`` with ``[v, omega]``;
    row ``k`` holds the pose at ``times[k]`` and the command applied from it.
    """

    times: np.ndarray
    poses: np.ndarray
    cmds: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def n_robots(self) -> int:
        return self.poses.shape[1]

    @property
    def n_records(self) -> int:
        return self.poses.shape[0] * self.poses.shape[1]

    def records(self):
        """Yield ``(t, robot_id, x, y, theta, v, omega)`` sorted by (t, robot_id)."""
        for k, t in enumerate(self.times):
            for i in range(self.n_robots):
                x, y, th = self.poses[k, i]
                v, w = self.cmds[k, i]
                yield float(t), i, float(x), float(y), float(th), float(v), float(w)

    def robot(self, robot_id: int) -> np.ndarray:
        """``(T, 2)`` positions of one robot."""
        return self.poses[:, robot_id, :2]

    @property
    def domain(self) -> Domain | None:
        d = self.metadata.get("domain")
        return Domain.from_dict(d) if d else None

    def spec(self) -> BehaviorSpec:
        return BehaviorSpec.from_dict(self.metadata["spec"], self.domain)


def run(
    spec: BehaviorSpec,
    n: int,
    domain: Domain,
    duration: float,
    dt: float = DEFAULT_DT,
    seed: int = 0,
) -> TrajectoryLog:
    """Simulate ``ceil(duration / dt)`` steps and log every robot at every step."""
    check_dt(dt)
    steps = n_steps(duration, dt)
    state = init_behavior(spec, n, domain, seed, dt)
    poses = np.empty((steps + 1, n, 3))
    cmds = np.empty((steps + 1, n, 2))
    for k in range(steps + 1):
        cmd, _ = commands(state, spec)
        poses[k] = state.poses
        cmds[k, :, 0] = cmd.v
        cmds[k, :, 1] = cmd.omega
        if k < steps:
            state = integrate(state, cmd)
    meta = {
        "emotion": spec.emotion,
        "n": n,
        "duration": duration,
        "dt": dt,
        "seed": seed,
        "steps": steps,
        "domain": domain.to_dict(),
        "spec": spec.to_dict(),
    }
    return TrajectoryLog(np.arange(steps + 1) * dt, poses, cmds, meta)
