"""Box-dimension and Minkowski-content estimation from sausage profiles.

The working definition: |A_eps| ~ C * eps^(n - d) as eps -> 0, so d is
n minus the least-squares slope of log|A_eps| against log eps. A single
slope is reported; the upper/lower distinction is out of numerical reach
and the r^2 diagnostic is the honesty check instead.

Unbounded sets are handled by the inversion definition: estimate the
dimension of the geometric inverse, which is bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .curves import SampledCurve, invert_curve, invert_point, resample_curve
from .errors import DomainError, NumericalError
from .sausage import (
    DEFAULT_RASTER,
    RasterConfig,
    SausageProfile,
    box_count_areas,
    sausage_areas,
)

R2_WARN = 0.98


@dataclass(frozen=True)
class DimensionEstimate:
    """A fitted scaling exponent with its regression diagnostics."""

    dimension: float
    content_at_d: Optional[float]
    eps_min: float
    eps_max: float
    num_scales: int
    r_squared: float
    method: str
    ambient_dim: int = 2
    warnings: tuple = ()
    parts: dict = field(default_factory=dict)  # sub-estimates, notes

    def __post_init__(self):
        if not (self.eps_min < self.eps_max):
            raise ValueError("eps_min must be below eps_max")
        if not (-0.1 <= self.dimension <= self.ambient_dim + 0.1):
            raise NumericalError(
                f"fitted dimension {self.dimension:.3f} is outside "
                f"[0, {self.ambient_dim}] + 0.1 slack; the scale window is bad"
            )
        if not (0.0 <= self.r_squared <= 1.0):
            raise ValueError("r_squared must lie in [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "content": self.content_at_d,
            "eps_min": self.eps_min,
            "eps_max": self.eps_max,
            "num_scales": self.num_scales,
            "r2": self.r_squared,
            "method": self.method,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ContentEstimate:
    """Median of |A_eps|/eps^(n-d) over the window, with its spread."""

    value: float
    spread: float  # max/min over the window; ~1 means converged
    d: float
    eps: np.ndarray
    values: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "content": self.value,
            "spread": self.spread,
            "d": self.d,
            "eps_min": float(self.eps.min()),
            "eps_max": float(self.eps.max()),
        }


def fit_dimension(profile: SausageProfile, ambient_dim: int = 2) -> DimensionEstimate:
    """Least-squares slope of log area vs log eps; dimension = n - slope."""
    if profile.num_scales < 5:
        raise ValueError("need at least 5 scales to fit a dimension")
    if np.any(profile.area <= 0):
        raise ValueError("degenerate profile with vanishing areas")
    x = np.log(profile.eps)
    y = np.log(profile.area)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    r2 = min(max(r2, 0.0), 1.0)
    warnings = ()
    if r2 < R2_WARN:
        warnings = (f"log-log fit r^2 = {r2:.4f} below {R2_WARN}",)
    dim = ambient_dim - slope
    content = float(np.median(profile.area / profile.eps**slope))
    return DimensionEstimate(
        dimension=float(dim),
        content_at_d=content,
        eps_min=float(profile.eps.min()),
        eps_max=float(profile.eps.max()),
        num_scales=profile.num_scales,
        r_squared=r2,
        method=profile.method,
        ambient_dim=ambient_dim,
        warnings=warnings,
    )


# -- scale windows -----------------------------------------------------------


def eps_window(eps_min: float, eps_max: float, scales: int = 12) -> np.ndarray:
    """Geometric ladder of `scales` values from eps_max down to eps_min."""
    if not (0 < eps_min < eps_max):
        raise ValueError("need 0 < eps_min < eps_max")
    return np.geomspace(eps_max, eps_min, max(5, int(scales)))


def default_eps_window(
    diameter: float,
    scales: int = 12,
    config: RasterConfig = DEFAULT_RASTER,
    shrink: float = 40.0,
) -> np.ndarray:
    """Window from the curve diameter: eps_max = diameter/shrink, 12 scales
    at ratio 2^(-1/2), with eps_min lifted if the raster budget demands it.
    """
    eps_max = diameter / shrink
    eps = eps_max * (2.0 ** (-0.5)) ** np.arange(max(5, scales))
    # budget guard: grid cells at the smallest scale must fit
    min_eps = diameter * config.cells_per_eps / math.sqrt(config.cell_budget) * 2.0
    eps = eps[eps >= min_eps] if eps[-1] < min_eps else eps
    if len(eps) < 5:
        raise NumericalError(
            "raster budget leaves fewer than 5 usable scales; "
            "raise the budget or shrink the curve"
        )
    return eps


# -- estimators ---------------------------------------------------------------

Geometry = Union[SampledCurve, np.ndarray, Sequence]


def _prepare(geometry: Geometry, eps: np.ndarray) -> Geometry:
    """Auto-resample curves to the eps_min/4 contract."""
    need = float(eps.min()) / 4
    if isinstance(geometry, SampledCurve):
        return resample_curve(geometry, need) if geometry.max_gap() > need else geometry
    if isinstance(geometry, (list, tuple)):
        return [_prepare(g, eps) for g in geometry]
    return geometry


def _geometry_diameter(geometry: Geometry) -> float:
    pts = []
    items = geometry if isinstance(geometry, (list, tuple)) else [geometry]
    for g in items:
        if isinstance(g, SampledCurve):
            xy = g.xy()
        else:
            xy = np.asarray(g, dtype=float)
        pts.append(xy.min(axis=0))
        pts.append(xy.max(axis=0))
    arr = np.vstack(pts)
    span = arr.max(axis=0) - arr.min(axis=0)
    return float(np.hypot(span[0], span[1]))


def dim_bounded(
    geometry: Geometry,
    eps_list: Optional[Sequence[float]] = None,
    config: RasterConfig = DEFAULT_RASTER,
    method: str = "sausage_grid",
) -> DimensionEstimate:
    """Box dimension of a bounded curve / point set / union of such."""
    if eps_list is None:
        eps = default_eps_window(_geometry_diameter(geometry), config=config)
    else:
        eps = np.sort(np.asarray(list(eps_list), dtype=float))[::-1]
    geometry = _prepare(geometry, eps)
    counter = sausage_areas if method == "sausage_grid" else box_count_areas
    profile = counter(geometry, eps, config)
    return fit_dimension(profile, ambient_dim=2)


def _invert_geometry(geometry: Geometry, center) -> Geometry:
    if isinstance(geometry, SampledCurve):
        return invert_curve(geometry, center=center)
    if isinstance(geometry, np.ndarray):
        return invert_point(geometry, center=center)
    return [_invert_geometry(g, center) for g in geometry]


def _min_dist(geometry, center) -> float:
    c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    items = geometry if isinstance(geometry, (list, tuple)) else [geometry]
    dists = []
    for g in items:
        xy = g.xy() if isinstance(g, SampledCurve) else np.asarray(g, dtype=float)
        dists.append(np.hypot(xy[:, 0] - c[0], xy[:, 1] - c[1]).min())
    return float(min(dists))


def dim_unbounded(
    geometry: Geometry,
    eps_list: Optional[Sequence[float]] = None,
    center=None,
    config: RasterConfig = DEFAULT_RASTER,
) -> DimensionEstimate:
    """Box dimension of an unbounded set, via its geometric inverse.

    The set must stay away from the inversion center. The eps scales refer
    to the inverted (bounded) picture, which is where the definition lives.
    """
    if _min_dist(geometry, center) <= 0:
        raise DomainError("set touches the inversion center")
    inverted = _invert_geometry(geometry, center)
    est = dim_bounded(inverted, eps_list=eps_list, config=config)
    est.parts["via"] = "inversion"
    return est


def _split_at_unit_circle(geometry: Geometry):
    """Partition into the part inside the closed unit disc and the rest."""
    bounded, unbounded = [], []
    items = geometry if isinstance(geometry, (list, tuple)) else [geometry]
    for g in items:
        if isinstance(g, SampledCurve):
            xy = g.xy()
            inside = np.hypot(xy[:, 0], xy[:, 1]) <= 1.0
            for lo, hi in _runs(inside):
                if hi - lo >= 2:
                    bounded.append(
                        SampledCurve(xy[lo:hi], source=g.source)
                    )
            for lo, hi in _runs(~inside):
                if hi - lo >= 2:
                    piece = SampledCurve(xy[lo:hi], source=g.source)
                    # tail metadata survives only on the piece that owns it
                    if hi == len(xy) and g.accumulation is not None:
                        acc = g.accumulation
                        if acc.target == "infinity":
                            piece = SampledCurve(
                                xy[lo:hi], source=g.source, accumulation=acc
                            )
                    unbounded.append(piece)
            if g.accumulation is not None and g.accumulation.target != "infinity":
                # bounded-side tails (origin / circle inside the disc)
                if bounded and np.all(inside[-2:]):
                    last = bounded[-1]
                    bounded[-1] = SampledCurve(
                        last.points,
                        source=last.source,
                        accumulation=g.accumulation,
                    )
        else:
            pts = np.asarray(g, dtype=float)
            r = np.hypot(pts[:, 0], pts[:, 1])
            if np.any(r <= 1.0):
                bounded.append(pts[r <= 1.0])
            if np.any(r > 1.0):
                unbounded.append(pts[r > 1.0])
    return bounded, unbounded


def _runs(mask: np.ndarray):
    """Maximal index runs where mask is True, as (start, stop) pairs."""
    idx = np.flatnonzero(np.diff(np.concatenate([[0], mask.view(np.int8), [0]])))
    return list(zip(idx[0::2], idx[1::2]))


def dim_general(
    geometry: Geometry,
    eps_list: Optional[Sequence[float]] = None,
    config: RasterConfig = DEFAULT_RASTER,
) -> DimensionEstimate:
    """Dimension of an arbitrary set: split at the unit ball, estimate the
    bounded part directly and the rest through inversion, take the max.
    """
    bounded, unbounded = _split_at_unit_circle(geometry)
    if not bounded and not unbounded:
        raise ValueError("empty input")
    sub = {}
    candidates = []
    if bounded:
        est_b = dim_bounded(bounded, eps_list=eps_list, config=config)
        sub["bounded"] = est_b.to_json_dict()
        candidates.append(est_b)
    if unbounded:
        est_u = dim_unbounded(unbounded, eps_list=eps_list, config=config)
        sub["unbounded"] = est_u.to_json_dict()
        candidates.append(est_u)
    best = max(candidates, key=lambda e: e.dimension)
    return DimensionEstimate(
        dimension=best.dimension,
        content_at_d=best.content_at_d,
        eps_min=best.eps_min,
        eps_max=best.eps_max,
        num_scales=best.num_scales,
        r_squared=best.r_squared,
        method=best.method,
        ambient_dim=2,
        warnings=best.warnings,
        parts=sub,
    )


def minkowski_content(
    geometry: Geometry,
    d: float,
    eps_list: Optional[Sequence[float]] = None,
    config: RasterConfig = DEFAULT_RASTER,
) -> ContentEstimate:
    """d-dimensional Minkowski content estimate: median of |A_eps|/eps^(2-d).

    `d` normally comes from an analytic oracle. Unbounded curves are
    inverted first (the content of an unbounded set is defined as the
    content of its inverse).
    """
    if not (0 < d <= 2):
        raise DomainError("content exponent d must lie in (0, 2]")
    if isinstance(geometry, SampledCurve) and geometry.accumulation is not None:
        if geometry.accumulation.target == "infinity":
            geometry = invert_curve(geometry)
    if eps_list is None:
        eps = default_eps_window(_geometry_diameter(geometry), config=config)
    else:
        eps = np.sort(np.asarray(list(eps_list), dtype=float))[::-1]
    geometry = _prepare(geometry, eps)
    profile = sausage_areas(geometry, eps, config)
    values = profile.area / profile.eps ** (2.0 - d)
    return ContentEstimate(
        value=float(np.median(values)),
        spread=float(values.max() / values.min()),
        d=d,
        eps=profile.eps,
        values=values,
    )
