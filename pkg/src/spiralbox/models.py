"""Closed-form spiral models and exact dimension/content formulas.

These are the oracles the numerical estimator is judged against: every
formula here has a closed form, and the generators emit exactly the
comparison spirals those formulas describe (power and exponential
approach to a focus or to a limit cycle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .curves import POLAR2, Accumulation, SampledCurve
from .errors import DomainError

SPIRAL_KINDS = (
    "power_focus",
    "exponential",
    "power_limit_cycle",
    "exponential_limit_cycle",
)


@dataclass(frozen=True)
class SpiralSpec:
    """Parametric spiral r(phi) with phi' = 1.

    power_focus:            r = C * phi^(-alpha) ("in") or C * phi^alpha ("out")
    exponential:            r = C * exp(-a0 * phi)         (a0 != 0)
    power_limit_cycle:      r = a + side * C * phi^(-1/(m-1))
    exponential_limit_cycle: r = a + side * C * exp(-beta * phi)
    """

    kind: str
    alpha: float = 0.5
    orientation: str = "in"
    a0: float = 1.0
    cycle_radius: float = 1.0
    multiplicity: float = 2.0
    side: int = 1
    beta: float = 1.0
    phi_start: float = 1.0
    coefficient: float = 1.0

    def __post_init__(self):
        if self.kind not in SPIRAL_KINDS:
            raise ValueError(f"unknown spiral kind {self.kind!r}")
        if not self.coefficient > 0:
            raise ValueError("coefficient must be positive")
        if self.kind == "power_focus":
            if not self.alpha > 0:
                raise ValueError("power_focus needs alpha > 0")
            if self.orientation not in ("in", "out"):
                raise ValueError("orientation must be 'in' or 'out'")
            if not self.phi_start > 0:
                raise ValueError("power spirals need phi_start > 0")
        elif self.kind == "exponential":
            if self.a0 == 0:
                raise ValueError("exponential spiral needs a0 != 0")
        elif self.kind == "power_limit_cycle":
            if not self.cycle_radius > 0:
                raise ValueError("cycle radius must be positive")
            if not self.multiplicity >= 2:
                raise ValueError("power limit-cycle spirals need multiplicity >= 2")
            if self.side not in (-1, 1):
                raise ValueError("side must be +1 or -1")
            if not self.phi_start > 0:
                raise ValueError("power spirals need phi_start > 0")
        else:
            if self.beta == 0:
                raise ValueError("exponential_limit_cycle needs beta != 0")
            if not self.cycle_radius > 0:
                raise ValueError("cycle radius must be positive")
            if self.side not in (-1, 1):
                raise ValueError("side must be +1 or -1")

    # -- closed forms -------------------------------------------------------

    def radius(self, phi):
        phi = np.asarray(phi, dtype=float)
        c = self.coefficient
        if self.kind == "power_focus":
            expo = -self.alpha if self.orientation == "in" else self.alpha
            return c * phi**expo
        if self.kind == "exponential":
            return c * np.exp(-self.a0 * phi)
        if self.kind == "power_limit_cycle":
            gamma = 1.0 / (self.multiplicity - 1.0)
            return self.cycle_radius + self.side * c * phi**-gamma
        return self.cycle_radius + self.side * c * np.exp(-self.beta * phi)

    def offset_from_limit(self, phi):
        """|r(phi) - limit radius| (limit radius is 0 for focus kinds)."""
        phi = np.asarray(phi, dtype=float)
        c = self.coefficient
        if self.kind == "power_focus":
            expo = -self.alpha if self.orientation == "in" else self.alpha
            return c * phi**expo
        if self.kind == "exponential":
            return c * np.exp(-self.a0 * phi)
        if self.kind == "power_limit_cycle":
            return c * phi ** (-1.0 / (self.multiplicity - 1.0))
        return c * np.exp(-self.beta * phi)

    def oracle_dimension(self) -> float:
        """The exact box dimension of the (full) model spiral."""
        if self.kind == "power_focus":
            return spiral_dim(self.alpha)
        if self.kind == "power_limit_cycle":
            return limit_cycle_dim(self.multiplicity)
        return 1.0

    def winding_gap(self, phi):
        """Radial distance between successive windings at angle phi."""
        phi = np.asarray(phi, dtype=float)
        return np.abs(self.offset_from_limit(phi) - self.offset_from_limit(phi + 2 * math.pi))

    def accumulation_at(self, phi_end: float) -> Accumulation:
        r_end = float(self.radius(phi_end))
        if self.kind == "power_focus" and self.orientation == "out":
            # gap quoted in the inverted picture, where the fill is used
            g = abs(1.0 / self.radius(phi_end) - 1.0 / self.radius(phi_end + 2 * math.pi))
            return Accumulation("infinity", from_radius=r_end, gap_scale=float(g))
        if self.kind == "exponential" and self.a0 < 0:
            g = abs(1.0 / self.radius(phi_end) - 1.0 / self.radius(phi_end + 2 * math.pi))
            return Accumulation("infinity", from_radius=r_end, gap_scale=float(g))
        gap = float(self.winding_gap(phi_end))
        if self.kind in ("power_focus", "exponential"):
            return Accumulation("origin", from_radius=r_end, gap_scale=gap)
        return Accumulation(
            "circle", radius=self.cycle_radius, from_radius=r_end, gap_scale=gap
        )


def phi_end_for_gap(spec: SpiralSpec, gap: float, phi_cap: float = 1e9) -> float:
    """Smallest phi beyond which successive windings are closer than `gap`.

    This is the truncation rule for dimension work: past this angle the
    tail is winding-dense at every scale >= gap and can be replaced by its
    analytic fill region.
    """
    if not gap > 0:
        raise ValueError("gap must be positive")
    c = spec.coefficient
    lo = spec.phi_start + 4 * math.pi
    if spec.kind == "power_focus":
        if spec.orientation == "in":
            # |d r/d phi| * 2pi ~ 2 pi alpha C phi^(-alpha-1)
            phi = (2 * math.pi * spec.alpha * c / gap) ** (1.0 / (1.0 + spec.alpha))
        else:
            # gap in the inverted picture: d(1/r)/dphi * 2pi
            phi = (2 * math.pi * spec.alpha / (c * gap)) ** (1.0 / (1.0 + spec.alpha))
    elif spec.kind == "exponential":
        a = abs(spec.a0)
        scale = c if spec.a0 > 0 else 1.0 / c
        phi = math.log(max(2 * math.pi * a * scale / gap, 2.0)) / a
    elif spec.kind == "power_limit_cycle":
        gamma = 1.0 / (spec.multiplicity - 1.0)
        phi = (2 * math.pi * gamma * c / gap) ** (1.0 / (1.0 + gamma))
    else:
        b = abs(spec.beta)
        phi = math.log(max(2 * math.pi * b * c / gap, 2.0)) / b
    return float(min(max(phi, lo), phi_cap))


def generate(
    spec: SpiralSpec,
    phi_end: float,
    max_gap: float,
    phi_step_cap: float = 0.02,
) -> SampledCurve:
    """Sample the spiral with consecutive chords <= max_gap (and angular
    steps <= phi_step_cap so the polyline stays faithful to the arc).
    Returns a polar curve with its accumulation metadata attached."""
    if not phi_end > spec.phi_start:
        raise ValueError("phi_end must exceed phi_start")
    if not max_gap > 0:
        raise ValueError("max_gap must be positive")
    # reference grid, piecewise in phi so its step tracks the local radius
    # (monotone-radius spirals span decades; a uniform grid would explode)
    phi_parts = []
    lo = spec.phi_start
    while lo < phi_end:
        hi = min(phi_end, 1.5 * lo + 1.0)
        r_big = max(float(spec.radius(lo)), float(spec.radius(hi)))
        step = min(phi_step_cap, max_gap / max(r_big, 1e-12)) / 4
        n = int(math.ceil((hi - lo) / step)) + 1
        phi_parts.append(np.linspace(lo, hi, n)[:-1])
        lo = hi
    phi = np.concatenate(phi_parts + [np.array([phi_end])])
    r = spec.radius(phi)
    dr = np.diff(r)
    rm = 0.5 * (r[1:] + r[:-1])
    chord = np.hypot(dr, rm * np.diff(phi))
    s = np.concatenate([[0.0], np.cumsum(chord)])
    # accept a reference point whenever either the arclength or the angle
    # budget since the last accepted point is spent; budgets carry margin
    # because acceptance lags by up to one reference chord
    key = np.floor(s / (0.6 * max_gap)) + np.floor((phi - phi[0]) / phi_step_cap)
    keep = np.concatenate([[True], np.diff(key) > 0])
    keep[0] = keep[-1] = True
    pts = np.column_stack([r[keep], phi[keep]])
    return SampledCurve(
        pts,
        POLAR2,
        source=f"spiral:{spec.kind}",
        accumulation=spec.accumulation_at(phi_end),
    )


# -- exact dimension formulas -------------------------------------------------


def spiral_dim(alpha: float) -> float:
    """Box dimension of the power spiral r = phi^(-alpha): max{1, 2/(1+alpha)}.

    By the inversion definition the unbounded spiral r = phi^alpha has the
    same dimension.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return max(1.0, 2.0 / (1.0 + alpha))


def mink_content_formula(m: float, alpha: float) -> float:
    """Minkowski content of a spiral with r ~ m * phi^(-alpha), alpha in (0,1):

        M^d = m^d * pi * (pi alpha)^(-2 alpha / (1 + alpha)) * (1+alpha)/(1-alpha)

    with d = 2/(1+alpha). Diverges as alpha -> 1 (the dimension degenerates
    to 1 there), so alpha >= 1 is rejected.
    """
    if not m > 0:
        raise DomainError("m must be positive")
    if not 0 < alpha < 1:
        raise DomainError("the content formula needs alpha in (0, 1)")
    d = 2.0 / (1.0 + alpha)
    return m**d * math.pi * (math.pi * alpha) ** (-2 * alpha / (1 + alpha)) * (
        (1 + alpha) / (1 - alpha)
    )


def focus_dim_at_infinity(k: int) -> float:
    """Dimension of a spiral trajectory at a weak focus of order k: 4k/(2k+1)."""
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("focus order k must be an integer >= 1")
    return 4.0 * k / (2 * k + 1)


def focus_dims(count: int = 8) -> list:
    """The admissible focus set D0 = {4/3, 8/5, 12/7, ...} as Fractions."""
    return [Fraction(4 * k, 2 * k + 1) for k in range(1, count + 1)]


def limit_cycle_dim(m: float) -> float:
    """Dimension of spirals at a multiplicity-m limit cycle: 2 - 1/m."""
    if not m >= 1:
        raise DomainError("multiplicity must be >= 1")
    return 2.0 - 1.0 / m


def limit_cycle_dims(count: int = 8) -> list:
    """The admissible cycle set D1 = {1, 3/2, 5/3, 7/4, ...} as Fractions."""
    return [Fraction(2 * m - 1, m) for m in range(1, count + 1)]


def oscillator_dim(alpha: int, beta: int) -> float:
    """Dimension 2(1 - 1/(alpha+beta)) for the weakly damped oscillator
    y'' + C y^alpha (y')^beta + y = 0 with alpha even, beta odd."""
    if not (isinstance(alpha, (int, np.integer)) and alpha > 0 and alpha % 2 == 0):
        raise DomainError("alpha must be an even positive integer")
    if not (isinstance(beta, (int, np.integer)) and beta > 0 and beta % 2 == 1):
        raise DomainError("beta must be an odd positive integer")
    return 2.0 * (1.0 - 1.0 / (alpha + beta))


def sphere_dim_transforms(
    alpha: Optional[float] = None, d1: Optional[float] = None
) -> dict:
    """Dimensions of the sphere image and its disc shadow of a focus spiral.

    Given the plane spiral's decay exponent alpha (any alpha > 0), the
    inverted-and-projected spiral on the Poincare sphere has dimension
    (2+alpha)/(1+alpha), and its orthogonal shadow on the plane
    (2+2 alpha)/(1+2 alpha). For a nontrivial plane dimension d1 in (1, 2)
    the same numbers are 1 + d1/2 and 4/(4 - d1).
    """
    if (alpha is None) == (d1 is None):
        raise ValueError("give exactly one of alpha, d1")
    if alpha is not None:
        if not alpha > 0:
            raise DomainError("alpha must be positive")
        return {
            "dim_gamma2": (2.0 + alpha) / (1.0 + alpha),
            "dim_gamma3": (2.0 + 2.0 * alpha) / (1.0 + 2.0 * alpha),
        }
    if not 1.0 < d1 < 2.0:
        raise DomainError("the d1 form needs d1 in (1, 2)")
    return {"dim_gamma2": 1.0 + d1 / 2.0, "dim_gamma3": 4.0 / (4.0 - d1)}


def nearest_admissible(x: float, max_index: int = 12) -> tuple:
    """Closest member of D0 union D1 to x: (value, label, residual)."""
    best = None
    for k in range(1, max_index + 1):
        v = focus_dim_at_infinity(k)
        if best is None or abs(x - v) < best[2]:
            best = (v, f"focus k={k}", abs(x - v))
    for m in range(1, max_index + 1):
        v = limit_cycle_dim(m)
        if abs(x - v) < best[2]:
            best = (v, f"cycle m={m}", abs(x - v))
    return best


FORMULAS = {
    "spiral_dim": (spiral_dim, ("alpha",)),
    "mink_content": (mink_content_formula, ("m", "alpha")),
    "focus_dim": (focus_dim_at_infinity, ("k",)),
    "limit_cycle_dim": (limit_cycle_dim, ("m",)),
    "oscillator_dim": (oscillator_dim, ("alpha", "beta")),
    "sphere_transforms": (sphere_dim_transforms, ("alpha", "d1")),
}
