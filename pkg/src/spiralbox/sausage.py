"""Raster measurement of epsilon-neighbourhood (sausage) areas.

For each scale eps a uniform grid of square cells (side eps/8, anchored at
the padded bounding-box corner) is laid over the scene, and the area is
the count of cells whose center lies within eps of the scene times the
cell area. The unresolved boundary band is a fixed fraction of the
neighbourhood at every scale, so it cancels out of log-log slopes.

A scene is one or more polylines and/or point clouds, plus optional
analytic fill regions. A fill region (disc or annulus) stands in for an
infinite spiral tail that is winding-dense beyond the sampled cutoff:
rasterizing such a tail literally is hopeless, but its epsilon
neighbourhood is exactly that of the region it fills, up to one boundary
band. Fills come from SampledCurve.accumulation metadata and carry the
gap scale at which they become valid.

The covered-cell count is accumulated in horizontal row blocks. Every
sample of the (per-scale, densified) curve cloud contributes, per grid
row it can reach, one column interval of covered cells; intervals are
unioned by scattering +1/-1 markers into a per-block array and counting
positive prefix sums. This keeps the cost near-linear in cloud size and
the memory bounded by the block size regardless of grid dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .curves import CARTESIAN3, SampledCurve
from .errors import DomainError, NumericalError, PreconditionError, ResourceError

SAUSAGE_GRID = "sausage_grid"
BOX_COUNT = "box_count"


@dataclass(frozen=True)
class FillRegion:
    """Analytic region treated as fully covered by the (unsampled) tail."""

    shape: str  # "disc" | "annulus"
    center: tuple
    r_outer: float
    r_inner: float = 0.0

    def __post_init__(self):
        if self.shape not in ("disc", "annulus"):
            raise ValueError(f"unknown fill shape {self.shape!r}")
        if not self.r_outer > 0:
            raise ValueError("fill outer radius must be positive")
        if self.shape == "annulus" and not (0 <= self.r_inner <= self.r_outer):
            raise ValueError("annulus radii must satisfy 0 <= inner <= outer")


@dataclass(frozen=True)
class RasterConfig:
    cells_per_eps: int = 8      # grid cell side = eps / cells_per_eps
    cloud_per_eps: int = 16     # curve sample spacing = eps / cloud_per_eps
    cell_budget: float = 1.6e9  # max grid cells for a single scale
    block_cells: int = 4_000_000


DEFAULT_RASTER = RasterConfig()


@dataclass(frozen=True)
class SausageProfile:
    """(eps, area) pairs with eps strictly decreasing."""

    eps: np.ndarray
    area: np.ndarray
    method: str = SAUSAGE_GRID

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        area = np.asarray(self.area, dtype=float)
        if eps.ndim != 1 or eps.shape != area.shape:
            raise ValueError("eps and area must be matching 1-D arrays")
        if np.any(np.diff(eps) >= 0):
            raise ValueError("eps must be strictly decreasing")
        if np.any(area <= 0):
            raise ValueError("areas must be positive")
        if np.any(area[1:] > area[:-1] * (1 + 1e-2)):
            raise NumericalError("sausage areas increase as eps shrinks")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "area", area)

    @property
    def num_scales(self) -> int:
        return len(self.eps)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write("eps,area\n")
            for e, a in zip(self.eps, self.area):
                fh.write(f"{e:.17g},{a:.17g}\n")
        return path

    @staticmethod
    def from_csv(path: Union[str, Path]) -> "SausageProfile":
        rows = []
        with Path(path).open() as fh:
            header = fh.readline().strip()
            if header != "eps,area":
                raise ValueError("expected 'eps,area' header")
            for line in fh:
                if line.strip():
                    e, a = line.split(",")
                    rows.append((float(e), float(a)))
        arr = np.asarray(rows, dtype=float)
        return SausageProfile(arr[:, 0], arr[:, 1])


# -- scene assembly ----------------------------------------------------------

Geometry = Union[SampledCurve, np.ndarray, Sequence]


@dataclass
class _Scene:
    polylines: list = field(default_factory=list)   # (n, 2) arrays
    points: list = field(default_factory=list)      # (n, 2) arrays
    fills: list = field(default_factory=list)       # FillRegion
    fill_gaps: list = field(default_factory=list)   # (gap_scale, from_radius)


def _build_scene(geometry: Geometry, scene: Optional[_Scene] = None) -> _Scene:
    if scene is None:
        scene = _Scene()
    if isinstance(geometry, SampledCurve):
        if geometry.coord_system == CARTESIAN3:
            raise DomainError("sausage areas are 2-D only; project first")
        xy = geometry.xy()
        if geometry.closed:
            xy = np.vstack([xy, xy[:1]])
        scene.polylines.append(xy)
        acc = geometry.accumulation
        if acc is not None:
            if acc.target == "infinity":
                raise DomainError(
                    "curve is unbounded (accumulates at infinity); invert it first"
                )
            if acc.target == "origin":
                scene.fills.append(
                    FillRegion("disc", acc.center, acc.from_radius)
                )
                scene.fill_gaps.append((acc.gap_scale, acc.from_radius))
            else:  # circle
                lo = min(acc.radius, acc.from_radius)
                hi = max(acc.radius, acc.from_radius)
                scene.fills.append(FillRegion("annulus", acc.center, hi, lo))
                scene.fill_gaps.append((acc.gap_scale, np.inf))
    elif isinstance(geometry, np.ndarray):
        pts = np.asarray(geometry, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("point sets must be (n, 2) arrays")
        scene.points.append(pts)
    elif isinstance(geometry, FillRegion):
        scene.fills.append(geometry)
    elif isinstance(geometry, Sequence) and not isinstance(geometry, (str, bytes)):
        for item in geometry:
            _build_scene(item, scene)
    else:
        raise TypeError(f"cannot interpret {type(geometry)!r} as sausage geometry")
    return scene


def _check_scene(scene: _Scene, eps_min: float) -> None:
    for xy in scene.polylines:
        gaps = np.hypot(*np.diff(xy, axis=0).T)
        if gaps.size and gaps.max() > eps_min / 4 * (1 + 1e-12):
            raise PreconditionError(
                f"curve under-sampled: max vertex gap {gaps.max():g} exceeds "
                f"eps_min/4 = {eps_min / 4:g}; run resample_curve(curve, "
                f"max_gap={eps_min / 4:g}) first"
            )
    for gap_scale, from_radius in scene.fill_gaps:
        # A fill is honest when the discarded windings are eps-dense, or
        # when the whole tail fits inside a quarter-eps ball anyway.
        if gap_scale > eps_min and from_radius > eps_min / 4:
            raise PreconditionError(
                f"tail fill only valid for eps >= {gap_scale:g}; extend the "
                f"curve (truncate deeper) or raise eps_min above that"
            )


def _scene_bbox(scene: _Scene) -> tuple:
    los, his = [], []
    for arr in scene.polylines + scene.points:
        los.append(arr.min(axis=0))
        his.append(arr.max(axis=0))
    for f in scene.fills:
        c = np.asarray(f.center, dtype=float)
        los.append(c - f.r_outer)
        his.append(c + f.r_outer)
    if not los:
        raise ValueError("empty scene")
    lo = np.min(np.vstack(los), axis=0)
    hi = np.max(np.vstack(his), axis=0)
    return lo, hi


def _densify(xy: np.ndarray, spacing: float) -> np.ndarray:
    """Points along the polyline at most `spacing` apart (vertices kept)."""
    seg = np.diff(xy, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    counts = np.maximum(1, np.ceil(lengths / spacing).astype(np.int64))
    idx = np.repeat(np.arange(len(lengths)), counts)
    frac = (np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)) \
        / counts[idx]
    pts = xy[idx] + seg[idx] * frac[:, None]
    return np.vstack([pts, xy[-1]])


# -- per-scale rasterization --------------------------------------------------


def _fill_intervals(fill: FillRegion, cy: np.ndarray, eps: float):
    """Covered x-intervals (per grid row center ordinate cy) for a fill.

    Returns a list of (lo_x, hi_x) arrays (NaN where a row misses the fill).
    A cell center is covered when its distance to the region is <= eps.
    """
    cxc, cyc = fill.center
    dy = cy - cyc
    r_out = fill.r_outer + eps
    w2 = r_out * r_out - dy * dy
    outer_w = np.sqrt(np.maximum(w2, 0.0))
    outer_w[w2 <= 0] = np.nan
    intervals = []
    hole = fill.shape == "annulus" and fill.r_inner - eps > 0
    if not hole:
        intervals.append((cxc - outer_w, cxc + outer_w))
        return intervals
    r_in = fill.r_inner - eps
    h2 = r_in * r_in - dy * dy
    hole_w = np.sqrt(np.maximum(h2, 0.0))
    no_hole = h2 <= 0
    # rows crossing the hole contribute two arcs, others a single chord
    left_hi = np.where(no_hole, cxc + outer_w, cxc - hole_w)
    intervals.append((cxc - outer_w, left_hi))
    right_lo = np.where(no_hole, np.nan, cxc + hole_w)
    intervals.append((right_lo, cxc + outer_w))
    return intervals


def _covered_cells(scene: _Scene, eps: float, cfg: RasterConfig) -> int:
    h = eps / cfg.cells_per_eps
    lo, hi = _scene_bbox(scene)
    pad = eps + 2 * h
    x0, y0 = lo[0] - pad, lo[1] - pad
    nx = int(np.ceil((hi[0] + pad - x0) / h)) + 1
    ny = int(np.ceil((hi[1] + pad - y0) / h)) + 1
    if nx * ny > cfg.cell_budget:
        raise ResourceError(
            f"eps={eps:g} needs {nx}x{ny} cells, over the budget of "
            f"{cfg.cell_budget:g}; raise eps_min or the budget"
        )

    cloud_parts = [
        _densify(xy, eps / cfg.cloud_per_eps) for xy in scene.polylines
    ] + list(scene.points)
    cloud = np.vstack(cloud_parts) if cloud_parts else np.empty((0, 2))
    order = np.argsort(cloud[:, 1], kind="stable")
    sx_all = np.ascontiguousarray(cloud[order, 0])
    sy_all = np.ascontiguousarray(cloud[order, 1])

    width = nx + 1  # one spare column so interval end markers stay in range
    block_rows = max(1, cfg.block_cells // width)
    n_span = 2 * cfg.cells_per_eps + 2  # rows a single eps-disc can touch
    covered = 0

    for r0 in range(0, ny, block_rows):
        r1 = min(r0 + block_rows, ny)
        b = r1 - r0
        y_lo = y0 + r0 * h - eps - h
        y_hi = y0 + r1 * h + eps + h
        i_from = np.searchsorted(sy_all, y_lo, side="left")
        i_to = np.searchsorted(sy_all, y_hi, side="right")
        sx = sx_all[i_from:i_to]
        sy = sy_all[i_from:i_to]

        block_fills = [
            f for f in scene.fills
            if f.center[1] - f.r_outer - eps <= y0 + (r1 + 0.5) * h
            and f.center[1] + f.r_outer + eps >= y0 + (r0 - 0.5) * h
        ]
        if sx.size == 0 and not block_fills:
            continue

        starts_parts, ends_parts = [], []
        if sx.size:
            base_row = np.ceil((sy - eps - y0) / h - 0.5).astype(np.int64)
            for j in range(n_span):
                row = base_row + j
                in_block = (row >= r0) & (row < r1)
                if not np.any(in_block):
                    continue
                cy = y0 + (row + 0.5) * h
                w2 = eps * eps - (cy - sy) ** 2
                ok = in_block & (w2 > 0)
                if not np.any(ok):
                    continue
                w = np.sqrt(w2[ok])
                sxo = sx[ok]
                k_lo = np.ceil((sxo - w - x0) / h - 0.5).astype(np.int64)
                k_hi = np.floor((sxo + w - x0) / h - 0.5).astype(np.int64)
                good = (k_lo <= k_hi) & (k_hi >= 0) & (k_lo <= nx - 1)
                if not np.any(good):
                    continue
                k_lo = np.clip(k_lo[good], 0, nx - 1)
                k_hi = np.clip(k_hi[good], 0, nx - 1)
                rows_ok = (row[ok][good] - r0) * width
                starts_parts.append(rows_ok + k_lo)
                ends_parts.append(rows_ok + k_hi + 1)

        if block_fills:
            rows = np.arange(r0, r1, dtype=np.int64)
            cy = y0 + (rows + 0.5) * h
            for fill in block_fills:
                for lo_x, hi_x in _fill_intervals(fill, cy, eps):
                    ok = np.isfinite(lo_x) & np.isfinite(hi_x)
                    if not np.any(ok):
                        continue
                    k_lo = np.ceil((lo_x[ok] - x0) / h - 0.5).astype(np.int64)
                    k_hi = np.floor((hi_x[ok] - x0) / h - 0.5).astype(np.int64)
                    good = (k_lo <= k_hi) & (k_hi >= 0) & (k_lo <= nx - 1)
                    if not np.any(good):
                        continue
                    k_lo = np.clip(k_lo[good], 0, nx - 1)
                    k_hi = np.clip(k_hi[good], 0, nx - 1)
                    rows_ok = (rows[ok][good] - r0) * width
                    starts_parts.append(rows_ok + k_lo)
                    ends_parts.append(rows_ok + k_hi + 1)

        if not starts_parts:
            continue
        m = b * width
        counts = np.bincount(np.concatenate(starts_parts), minlength=m).astype(
            np.int32
        )
        counts -= np.bincount(np.concatenate(ends_parts), minlength=m).astype(
            np.int32
        )
        open_depth = counts.reshape(b, width).cumsum(axis=1)
        covered += int(np.count_nonzero(open_depth[:, :nx] > 0))
    return covered


def sausage_areas(
    geometry: Geometry,
    eps_list: Sequence[float],
    config: RasterConfig = DEFAULT_RASTER,
) -> SausageProfile:
    """Areas of the eps-neighbourhoods of the scene, one per scale.

    `geometry` may be a SampledCurve, an (n, 2) point array, a FillRegion,
    or any nesting of those in sequences; areas are of the union.
    Unbounded curves are rejected (invert them first), under-sampled
    curves raise a PreconditionError naming the resample call.
    """
    eps = np.sort(np.asarray(list(eps_list), dtype=float))[::-1]
    if eps.size == 0 or np.any(eps <= 0):
        raise ValueError("eps_list must contain positive scales")
    if np.any(np.diff(eps) == 0):
        raise ValueError("eps_list must not contain repeated scales")
    scene = _build_scene(geometry)
    _check_scene(scene, float(eps[-1]))
    h = np.array([e / config.cells_per_eps for e in eps])
    areas = np.array(
        [_covered_cells(scene, float(e), config) for e in eps], dtype=float
    ) * h * h
    return SausageProfile(eps, areas, SAUSAGE_GRID)


# -- occupied-box counting (secondary method) ---------------------------------


def _occupied_boxes(scene: _Scene, eps: float, cfg: RasterConfig) -> int:
    h = eps
    lo, hi = _scene_bbox(scene)
    pad = 2 * h
    x0, y0 = lo[0] - pad, lo[1] - pad
    nx = int(np.ceil((hi[0] + pad - x0) / h)) + 1
    ny = int(np.ceil((hi[1] + pad - y0) / h)) + 1
    if nx * ny > cfg.cell_budget:
        raise ResourceError(f"eps={eps:g} exceeds the box budget")
    cloud_parts = [_densify(xy, h / 4) for xy in scene.polylines] + list(scene.points)
    cloud = np.vstack(cloud_parts) if cloud_parts else np.empty((0, 2))
    kx = np.floor((cloud[:, 0] - x0) / h).astype(np.int64)
    ky = np.floor((cloud[:, 1] - y0) / h).astype(np.int64)
    keys = set(np.unique(ky * nx + kx).tolist())
    for fill in scene.fills:
        cxc, cyc = fill.center
        rows = np.arange(ny, dtype=np.int64)
        cy = y0 + (rows + 0.5) * h
        dyn = np.maximum(0.0, np.abs(cy - cyc) - h / 2)  # box edge to center
        w2 = fill.r_outer**2 - dyn**2
        sel = w2 > 0
        w = np.sqrt(w2[sel])
        k_lo = np.floor((cxc - w - h / 2 - x0) / h + 0.5).astype(np.int64)
        k_hi = np.floor((cxc + w + h / 2 - x0) / h - 0.5).astype(np.int64)
        np.clip(k_lo, 0, nx - 1, out=k_lo)
        np.clip(k_hi, 0, nx - 1, out=k_hi)
        hole = fill.shape == "annulus" and fill.r_inner > 0
        dyf = np.abs(cy[sel] - cyc) + h / 2  # farthest box corner
        hw2 = fill.r_inner**2 - dyf**2 if hole else np.full(sel.sum(), -1.0)
        for row, klo, khi, hw2_i in zip(rows[sel], k_lo, k_hi, hw2):
            if klo > khi:
                continue
            if hw2_i > 0:
                whh = np.sqrt(hw2_i) - h / 2
                if whh > 0:
                    hl = int(np.floor((cxc - whh - x0) / h)) + 1
                    hh = int(np.ceil((cxc + whh - x0) / h)) - 1
                    for k in range(klo, min(hl, khi + 1)):
                        keys.add(int(row * nx + k))
                    for k in range(max(hh + 1, klo), khi + 1):
                        keys.add(int(row * nx + k))
                    continue
            base = int(row * nx)
            keys.update(range(base + klo, base + khi + 1))
    return len(keys)


def box_count_areas(
    geometry: Geometry,
    eps_list: Sequence[float],
    config: RasterConfig = DEFAULT_RASTER,
) -> SausageProfile:
    """N(eps) * eps^2 profile from counting occupied boxes of side eps.

    Coarser than the sausage grid but shares the fitting machinery:
    log(N eps^2) has slope 2 - dim as well.
    """
    eps = np.sort(np.asarray(list(eps_list), dtype=float))[::-1]
    if eps.size == 0 or np.any(eps <= 0):
        raise ValueError("eps_list must contain positive scales")
    scene = _build_scene(geometry)
    _check_scene(scene, float(eps[-1]))
    areas = np.array(
        [_occupied_boxes(scene, float(e), config) * e * e for e in eps]
    )
    return SausageProfile(eps, areas, BOX_COUNT)
