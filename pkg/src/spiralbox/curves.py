"""Sampled curves, polar/Cartesian conversion, and geometric inversion.

The inversion x -> x/|x|^2 is the workhorse: it is an involution of the
punctured plane that swaps neighbourhoods of the origin and of infinity,
which is how dimensions of unbounded sets are defined here.

Angles of polar curves are always stored unwrapped (phi in R, strictly
monotone); nothing in the spiral machinery survives a mod-2pi wrap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, PreconditionError

CARTESIAN2 = "cartesian2"
POLAR2 = "polar2"
CARTESIAN3 = "cartesian3"
COORD_SYSTEMS = (CARTESIAN2, POLAR2, CARTESIAN3)

ArrayLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class Accumulation:
    """Describes where the true curve goes beyond the sampled cutoff.

    target:       "origin", "infinity", or "circle".
    radius:       limit-circle radius (target == "circle" only).
    from_radius:  polar radius of the last sampled point; the discarded
                  tail stays between it and the target.
    gap_scale:    radial gap between successive windings at the cutoff.
                  Area estimators may treat the tail region as filled only
                  at scales eps >= gap_scale. For target "infinity" the
                  gap is quoted in the inverted (bounded) picture, which
                  is where it gets used.
    center:       accumulation center (origin unless a shifted inversion
                  moved it).
    """

    target: str
    radius: float = 0.0
    from_radius: float = 0.0
    gap_scale: float = 0.0
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.target not in ("origin", "infinity", "circle"):
            raise ValueError(f"unknown accumulation target {self.target!r}")
        if self.target == "circle" and not self.radius > 0:
            raise ValueError("circle accumulation needs a positive radius")

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "radius": self.radius,
            "from_radius": self.from_radius,
            "gap_scale": self.gap_scale,
            "center": list(self.center),
        }

    @staticmethod
    def from_dict(d: dict) -> "Accumulation":
        return Accumulation(
            target=d["target"],
            radius=d.get("radius", 0.0),
            from_radius=d.get("from_radius", 0.0),
            gap_scale=d.get("gap_scale", 0.0),
            center=tuple(d.get("center", (0.0, 0.0))),
        )


@dataclass(frozen=True)
class SampledCurve:
    """Ordered polyline in the plane (or in R^3 for sphere images).

    points: (n, 2) or (n, 3) float array. For coord_system "polar2" the
    columns are (r, phi) with r >= 0 and phi unwrapped, strictly monotone.
    """

    points: np.ndarray
    coord_system: str = CARTESIAN2
    closed: bool = False
    source: str = ""
    accumulation: Optional[Accumulation] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if self.coord_system not in COORD_SYSTEMS:
            raise ValueError(f"unknown coord_system {self.coord_system!r}")
        want = 3 if self.coord_system == CARTESIAN3 else 2
        if pts.shape[1] != want:
            raise ValueError(
                f"{self.coord_system} curves need {want} columns, got {pts.shape[1]}"
            )
        if pts.shape[0] < 2:
            raise ValueError("a curve needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve coordinates must be finite")
        if np.any(np.all(np.diff(pts, axis=0) == 0.0, axis=1)):
            raise ValueError("consecutive curve points must be distinct")
        if self.coord_system == POLAR2:
            r, phi = pts[:, 0], pts[:, 1]
            if np.any(r < 0):
                raise ValueError("polar radius must be nonnegative")
            dphi = np.diff(phi)
            if not (np.all(dphi > 0) or np.all(dphi < 0)):
                raise ValueError("polar angle must be strictly monotone (unwrapped)")
        object.__setattr__(self, "points", pts)

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def xy(self) -> np.ndarray:
        """Cartesian (n, 2) coordinates (projection on the plane for 3-D)."""
        if self.coord_system == POLAR2:
            return polar_to_cartesian(self.points)
        return self.points[:, :2]

    def radii(self) -> np.ndarray:
        if self.coord_system == POLAR2:
            return self.points[:, 0].copy()
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def phi(self) -> np.ndarray:
        if self.coord_system != POLAR2:
            raise ValueError("phi is only stored for polar curves")
        return self.points[:, 1].copy()

    def min_radius(self) -> float:
        return float(self.radii().min())

    def diameter(self) -> float:
        """Diameter of the bounding box (cheap, good enough for windows)."""
        xy = self.points if self.coord_system != POLAR2 else self.xy()
        span = xy.max(axis=0) - xy.min(axis=0)
        return float(np.hypot(*span[:2]) if span.size == 2 else np.linalg.norm(span))

    def chord_gaps(self) -> np.ndarray:
        """Euclidean lengths of consecutive polyline segments."""
        xy = self.xy()
        return np.hypot(*np.diff(xy, axis=0).T)

    def max_gap(self) -> float:
        return float(self.chord_gaps().max())

    def to_cartesian(self) -> "SampledCurve":
        if self.coord_system != POLAR2:
            return self
        return replace(self, points=self.xy(), coord_system=CARTESIAN2)


# -- conversions ----------------------------------------------------------


def polar_to_cartesian(points: np.ndarray) -> np.ndarray:
    r, phi = np.asarray(points, dtype=float).T
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def cartesian_to_polar(xy: np.ndarray) -> np.ndarray:
    """(x, y) rows to (r, phi) with phi unwrapped along the curve."""
    xy = np.asarray(xy, dtype=float)
    r = np.hypot(xy[:, 0], xy[:, 1])
    if np.any(r == 0):
        raise DomainError("cannot assign a polar angle to the origin")
    phi = np.unwrap(np.arctan2(xy[:, 1], xy[:, 0]))
    return np.column_stack([r, phi])


# -- geometric inversion ---------------------------------------------------


def invert_point(p: ArrayLike, center: Optional[ArrayLike] = None) -> np.ndarray:
    """Geometric inversion p -> p/|p|^2 (optionally about a shifted center).

    Involutive; undefined at the inversion center.
    """
    q = np.asarray(p, dtype=float)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if center is not None:
        q = q - np.asarray(center, dtype=float)
    n2 = np.sum(q * q, axis=1)
    if np.any(n2 == 0.0):
        raise DomainError("inversion undefined at origin")
    out = q / n2[:, None]
    return out[0] if single else out


def invert_curve(c: SampledCurve, center: Optional[ArrayLike] = None) -> SampledCurve:
    """Pointwise inversion of a curve; polar curves map exactly as r -> 1/r.

    Monotone phi and the closed flag are preserved; accumulation metadata
    is carried through (origin and infinity targets swap).
    """
    if c.coord_system == CARTESIAN3:
        raise DomainError("inversion of 3-D curves is not supported")
    shifted = center is not None and np.any(np.asarray(center, dtype=float) != 0.0)
    if c.coord_system == POLAR2 and not shifted:
        r, phi = c.points.T
        if np.any(r == 0.0):
            raise DomainError("inversion undefined at origin")
        pts = np.column_stack([1.0 / r, phi])
        return replace(c, points=pts, accumulation=_invert_accumulation(c.accumulation))
    xy = c.xy()
    inv = invert_point(xy, center=center)
    acc = (
        _shift_invert_accumulation(c.accumulation, center, c)
        if shifted
        else _invert_accumulation(c.accumulation)
    )
    return SampledCurve(
        inv, CARTESIAN2, closed=c.closed, source=c.source, accumulation=acc
    )


def _invert_accumulation(acc: Optional[Accumulation]) -> Optional[Accumulation]:
    if acc is None:
        return None
    if acc.target == "origin":
        return replace(acc, target="infinity", from_radius=1.0 / acc.from_radius)
    if acc.target == "infinity":
        return replace(acc, target="origin", from_radius=1.0 / acc.from_radius)
    # circle of radius a maps to circle of radius 1/a; radial gaps near the
    # cutoff contract by the product of the two radii (Lemma-id identity).
    new_gap = acc.gap_scale / (acc.radius * acc.from_radius)
    return Accumulation(
        "circle",
        radius=1.0 / acc.radius,
        from_radius=1.0 / acc.from_radius,
        gap_scale=new_gap,
        center=acc.center,
    )


def _shift_invert_accumulation(
    acc: Optional[Accumulation], center: ArrayLike, c: SampledCurve
) -> Optional[Accumulation]:
    """Conservative metadata transport through a shifted inversion."""
    if acc is None:
        return None
    w = np.asarray(center, dtype=float)
    wn = float(np.hypot(*w))
    if acc.target == "infinity":
        fr = acc.from_radius
        if fr <= wn:
            return None
        scale = 1.0 / (fr - wn)
        return Accumulation(
            "origin",
            from_radius=scale,
            gap_scale=acc.gap_scale * (fr / (fr - wn)) ** 2,
            center=(0.0, 0.0),
        )
    if acc.target == "origin":
        fr = acc.from_radius
        if wn <= fr:
            return None
        new_center = -w / wn**2
        scale = 1.0 / (wn * (wn - fr))
        return Accumulation(
            "origin",
            from_radius=fr * scale,
            gap_scale=acc.gap_scale * scale,
            center=(float(new_center[0]), float(new_center[1])),
        )
    return None  # circles off-center: drop rather than guess


def scale_curve(c: SampledCurve, factor: float) -> SampledCurve:
    """Similarity x -> factor * x about the origin (dimension-invariant)."""
    if not factor > 0:
        raise ValueError("scale factor must be positive")
    pts = c.points.copy()
    if c.coord_system == POLAR2:
        pts[:, 0] *= factor
    else:
        pts *= factor
    acc = c.accumulation
    if acc is not None:
        gap = acc.gap_scale * (1.0 / factor if acc.target == "infinity" else factor)
        acc = Accumulation(
            acc.target,
            radius=acc.radius * factor,
            from_radius=acc.from_radius * factor,
            gap_scale=gap,
            center=(acc.center[0] * factor, acc.center[1] * factor),
        )
    return replace(c, points=pts, accumulation=acc)


# -- resampling ------------------------------------------------------------


def resample_curve(c: SampledCurve, max_gap: float) -> SampledCurve:
    """Insert intermediate vertices so consecutive chords are <= max_gap.

    Polar curves are subdivided linearly in (r, phi), which follows the
    spiral; Cartesian curves are subdivided along their chords. Original
    vertices are kept.
    """
    if not max_gap > 0:
        raise ValueError("max_gap must be positive")
    gaps = c.chord_gaps()
    if gaps.max() <= max_gap:
        return c
    counts = np.maximum(1, np.ceil(gaps / max_gap).astype(int))
    pts = c.points
    seg_idx = np.repeat(np.arange(len(gaps)), counts)
    within = np.concatenate([np.arange(k) / k for k in counts])
    new_pts = pts[seg_idx] + (pts[seg_idx + 1] - pts[seg_idx]) * within[:, None]
    new_pts = np.vstack([new_pts, pts[-1]])
    return replace(c, points=new_pts)


def require_sampling(c: SampledCurve, eps_min: float, factor: float = 4.0) -> None:
    """Raise unless consecutive chords are <= eps_min/factor."""
    gap = c.max_gap()
    need = eps_min / factor
    if gap > need * (1 + 1e-12):
        raise PreconditionError(
            f"curve is under-sampled for eps_min={eps_min:g}: max gap {gap:g} "
            f"exceeds {need:g}; run resample_curve(curve, max_gap={need:g}) first"
        )


# -- curve exchange format --------------------------------------------------


def write_curve_csv(c: SampledCurve, path: Union[str, Path]) -> Path:
    """Write the exchange CSV: first line the coord system, then rows.

    A metadata sidecar <path>.meta.json is written when the curve carries
    anything beyond its points.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(c.coord_system + "\n")
        for row in c.points:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    meta = {}
    if c.closed:
        meta["closed"] = True
    if c.source:
        meta["source"] = c.source
    if c.accumulation is not None:
        meta["accumulation"] = c.accumulation.to_dict()
    if meta:
        sidecar = path.with_suffix(path.suffix + ".meta.json")
        sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return path


def read_curve_csv(path: Union[str, Path]) -> SampledCurve:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        if header not in COORD_SYSTEMS:
            raise ValueError(f"{path}: first line must name a coord system")
        rows = [
            [float(tok) for tok in line.split(",")]
            for line in fh
            if line.strip()
        ]
    meta = {}
    sidecar = path.with_suffix(path.suffix + ".meta.json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
    acc = meta.get("accumulation")
    return SampledCurve(
        np.asarray(rows, dtype=float),
        header,
        closed=meta.get("closed", False),
        source=meta.get("source", ""),
        accumulation=Accumulation.from_dict(acc) if acc else None,
    )
