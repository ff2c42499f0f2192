"""Density fields that tell the coverage behaviors where robots should gather.

The three shapes (flat, a central bump, a raised rim) are reconstructions:
only their qualitative look is known, so the functional forms and default
widths below are choices of this package.

All fields are vectorized: ``q`` may be a single ``(2,)`` point or any
``(..., 2)`` array, and the result has shape ``q.shape[:-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain

KINDS = ("uniform", "gaussian_center", "boundary")

SIGMA_FRACTION = 0.15
MARGIN_FRACTION = 0.08
DEFAULT_FLOOR = 0.05


class DensityError(ValueError):
    pass


class NonpositiveSigma(DensityError):
    pass


class BadMargin(DensityError):
    pass


def uniform_density(q) -> np.ndarray | float:
    """Constant field equal to one."""
    q = np.asarray(q, dtype=float)
    out = np.ones(q.shape[:-1])
    return float(out) if out.ndim == 0 else out


def gaussian_center_density(q, domain: Domain, sigma: float) -> np.ndarray | float:
    """Unnormalized Gaussian bump at the domain midpoint, peak value 1."""
    if not sigma > 0:
        raise NonpositiveSigma(f"sigma must be positive, got {sigma}")
    q = np.asarray(q, dtype=float)
    r2 = ((q - domain.center) ** 2).sum(axis=-1)
    out = np.exp(-r2 / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def edge_distance(q, domain: Domain) -> np.ndarray:
    """Distance from each point to the nearest side of the rectangle."""
    q = np.asarray(q, dtype=float)
    x, y = q[..., 0], q[..., 1]
    return np.minimum(
        np.minimum(x - domain.x_min, domain.x_max - x),
        np.minimum(y - domain.y_min, domain.y_max - y),
    )


def boundary_density(q, domain: Domain, margin: float, floor: float = DEFAULT_FLOOR):
    """One within ``margin`` of an edge, Gaussian falloff to ``floor`` inward."""
    if not (0 < margin < 0.5 * domain.min_side):
        raise BadMargin(f"margin must lie in (0, {0.5 * domain.min_side}), got {margin}")
    if not (0 < floor < 1):
        raise DensityError(f"floor must lie in (0, 1), got {floor}")
    excess = np.maximum(0.0, edge_distance(q, domain) - margin)
    out = floor + (1.0 - floor) * np.exp(-(excess**2) / (2.0 * margin * margin))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DensityField:
    """A density kind bound to a domain and its numeric parameters.

    Instances are callable on points and validate their parameters eagerly.
    """

    kind: str
    domain: Domain
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DensityError(f"unknown density kind {self.kind!r}; expected one of {KINDS}")
        params = dict(self.params)
        ref = self.domain.min_side
        if self.kind == "gaussian_center":
            params.setdefault("sigma", SIGMA_FRACTION * ref)
            params = {"sigma": float(params["sigma"])}
            if not params["sigma"] > 0:
                raise NonpositiveSigma(f"sigma must be positive, got {params['sigma']}")
        elif self.kind == "boundary":
            params.setdefault("margin", MARGIN_FRACTION * ref)
            params.setdefault("floor", DEFAULT_FLOOR)
            params = {"margin": float(params["margin"]), "floor": float(params["floor"])}
            boundary_density(self.domain.center, self.domain, **params)
        else:
            params = {}
        object.__setattr__(self, "params", params)

    def __call__(self, q):
        if self.kind == "uniform":
            return uniform_density(q)
        if self.kind == "gaussian_center":
            return gaussian_center_density(q, self.domain, self.params["sigma"])
        return boundary_density(q, self.domain, self.params["margin"], self.params["floor"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


def make_density(kind: str, domain: Domain, **params) -> DensityField:
    return DensityField(kind, domain, params)
