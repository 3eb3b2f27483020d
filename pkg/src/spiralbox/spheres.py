"""Riemann and Poincare sphere projections.

riemann_project is the plain stereographic projection onto the sphere of
radius R resting on the plane (center (0, 0, R), projection point the
north pole (0, 0, 2R)): the origin maps to the south pole, infinity to
the north pole.

poincare_project implements the central projection used for spirals near
infinity: the input radius is mapped through the composite
inversion-plus-projection profile, so r = 0 lands on the equator and
r -> infinity at the pole. This follows the displayed cylindrical formula
(R/sqrt(1+R^2 r^2), phi, R^2 r/sqrt(1+R^2 r^2)) verbatim even though a
plane tangent at the north pole would naively put r = 0 at the pole; the
axis convention is inherited as-is.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .curves import CARTESIAN2, CARTESIAN3, POLAR2, SampledCurve

RIEMANN = "riemann"
POINCARE = "poincare"

_SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class SpherePoint:
    """A point constrained to one of the two spheres used here."""

    position: np.ndarray
    sphere_kind: str
    radius: float

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,):
            raise ValueError("position must be a 3-vector")
        if self.sphere_kind not in (RIEMANN, POINCARE):
            raise ValueError(f"unknown sphere kind {self.sphere_kind!r}")
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")
        d = np.linalg.norm(pos - self.center)
        if abs(d - self.radius) > _SPHERE_TOL * max(1.0, self.radius):
            raise ValueError(
                f"point is off the {self.sphere_kind} sphere by {d - self.radius:.3g}"
            )
        object.__setattr__(self, "position", pos)

    @property
    def center(self) -> np.ndarray:
        if self.sphere_kind == RIEMANN:
            return np.array([0.0, 0.0, self.radius])
        return np.zeros(3)


# -- Riemann sphere ---------------------------------------------------------


def _riemann_xyz(xy: np.ndarray, R: float) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    s2 = x * x + y * y
    denom = s2 + 4.0 * R * R
    return np.column_stack(
        [4.0 * R * R * x / denom, 4.0 * R * R * y / denom, 2.0 * R * s2 / denom]
    )


def riemann_project(p, R: float = 0.5) -> SpherePoint:
    """Stereographic image of a plane point on the radius-R Riemann sphere."""
    if not R > 0:
        raise ValueError("R must be positive")
    xy = np.asarray(p, dtype=float).reshape(1, 2)
    pos = _riemann_xyz(xy, R)[0]
    return SpherePoint(pos, RIEMANN, R)


def riemann_project_curve(c: SampledCurve, R: float = 0.5) -> SampledCurve:
    if not R > 0:
        raise ValueError("R must be positive")
    pts = _riemann_xyz(c.xy(), R)
    return SampledCurve(pts, CARTESIAN3, closed=c.closed, source=c.source)


def inversion_riemann_profile(r, R: float = 0.5):
    """Horizontal sphere radius of a point at plane radius r after
    inversion followed by stereographic projection: 4R^2 r/(4R^2 r^2 + 1).

    At R = 1/2 this is r/(r^2 + 1), which is symmetric under r -> 1/r, so
    it also gives the horizontal profile of the plain projection there.
    """
    r = np.asarray(r, dtype=float)
    return 4.0 * R * R * r / (4.0 * R * R * r * r + 1.0)


# -- Poincare sphere ---------------------------------------------------------


def _poincare_xyz(r: np.ndarray, phi: np.ndarray, R: float) -> np.ndarray:
    root = np.sqrt(1.0 + R * R * r * r)
    horizontal = R / root
    z = R * R * r / root
    return np.column_stack([horizontal * np.cos(phi), horizontal * np.sin(phi), z])


def poincare_project(p, R: float = 1.0) -> SpherePoint:
    """Image of a plane point on the radius-R Poincare sphere (centered at
    the origin). The plane radius enters through the composite profile:
    r = 0 sits on the equator, r -> infinity tends to the pole (0, 0, R).
    """
    if not R > 0:
        raise ValueError("R must be positive")
    x, y = float(p[0]), float(p[1])
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    pos = _poincare_xyz(np.array([r]), np.array([phi]), R)[0]
    return SpherePoint(pos, POINCARE, R)


def poincare_project_curve(c: SampledCurve, R: float = 1.0) -> SampledCurve:
    if not R > 0:
        raise ValueError("R must be positive")
    if c.coord_system == POLAR2:
        r, phi = c.points.T
    else:
        xy = c.xy()
        r = np.hypot(xy[:, 0], xy[:, 1])
        phi = np.unwrap(np.arctan2(xy[:, 1], xy[:, 0]))
    pts = _poincare_xyz(r, phi, R)
    return SampledCurve(pts, CARTESIAN3, closed=c.closed, source=c.source)


# -- disc projection ---------------------------------------------------------


def disc_project(s: SpherePoint) -> np.ndarray:
    """Orthogonal projection of a Poincare-sphere point on the xy-plane."""
    if s.sphere_kind != POINCARE:
        raise ValueError("disc projection expects a Poincare sphere point")
    return s.position[:2].copy()


def disc_project_curve(c: SampledCurve) -> SampledCurve:
    if c.coord_system != CARTESIAN3:
        raise ValueError("disc projection expects a 3-D curve")
    return SampledCurve(
        c.points[:, :2], CARTESIAN2, closed=c.closed, source=c.source
    )
