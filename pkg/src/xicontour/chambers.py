"""Chambers: connected components of the complement of a completed contour.

Counts are computed twice.  The arrangement route subdivides the clipped
polylines at exact intersections and counts bounded faces with Euler's
formula; the raster route draws the curves into a square grid and labels
the free pixels.  The two must agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.draw import line as draw_line

from .arrangement import (
    EulerCount,
    box_segments,
    clip_polyline,
    euler_count,
    line_segment,
    planar_graph,
    segment_intersections,
)
from .exceptions import WindowTooSmall

DEFAULT_WINDOW = 8.0
DEFAULT_RESOLUTION = 2048
MERGE_REL = 1e-6
CLEARANCE_REL = 1e-3
NEAR_TANGENT = 1e-3


@dataclass(frozen=True)
class Chamber:
    id: int
    representative: np.ndarray
    bounded: bool
    clearance: float
    area: float


@dataclass
class ChamberCount:
    count: int
    inner: int
    chambers: list
    arrangement: EulerCount
    arrangement_inner: int
    raster_count: int
    raster_inner: int
    window: float
    resolution: int
    labels: np.ndarray = field(repr=False)
    doubled: tuple | None = None

    @property
    def agree(self) -> bool:
        return self.count == self.raster_count and self.inner == self.raster_inner

    @property
    def outer(self) -> int:
        return self.count - self.inner

    def _pixel(self, v):
        h = 2 * self.window / self.resolution
        ij = np.floor((np.asarray(v, dtype=float) + self.window) / h).astype(int)
        if np.any(ij < 0) or np.any(ij >= self.resolution):
            return None
        return ij[1], ij[0]

    def locate(self, v):
        """Chamber id containing ``v``, or None on a curve pixel or outside the window."""
        px = self._pixel(v)
        if px is None:
            return None
        lab = int(self.labels[px])
        return lab - 1 if lab > 0 else None

    def sample(self, chamber_id: int, k: int, rng=None, margin: float = 0.5) -> np.ndarray:
        """``k`` points of a chamber, drawn from pixels at least ``margin`` times its max clearance from walls."""
        rng = np.random.default_rng(rng)
        mask = self.labels == chamber_id + 1
        dist = ndimage.distance_transform_edt(mask)
        good = np.argwhere(dist >= margin * dist.max())
        pick = good[rng.choice(len(good), size=k, replace=len(good) < k)]
        h = 2 * self.window / self.resolution
        return np.column_stack([pick[:, 1], pick[:, 0]]) * h - self.window + 0.5 * h


def _pieces(contour):
    """Polylines and lines of a completed contour (or of a bare list of arcs)."""
    if hasattr(contour, "arcs"):
        arcs, lines = contour.arcs, contour.lines
    else:
        arcs, lines = list(contour), []
    polys = [np.asarray(a.points if hasattr(a, "points") else a, dtype=float) for a in arcs]
    return polys, list(lines)


def _line_frame(ln):
    if hasattr(ln, "point_and_direction"):
        base, direction = ln.point_and_direction()
    else:
        base, direction = (np.asarray(x, dtype=float) for x in ln)
    normal = np.array([-direction[1], direction[0]]) / np.linalg.norm(direction)
    return base, normal


def snap_asymptotes(polys, lines, tol):
    """Join arcs to lines they are asymptotic to.

    An arc approaching a facet line exponentially fast soon sits closer to it
    than floating point can resolve, and the two then "cross" at random.
    Curves within ``tol`` of each other count as meeting, so a tail that
    stays within ``tol`` of a line is cut and replaced by one short segment
    crossing the line cleanly: the arc meets its asymptote exactly once.
    """
    out = []
    for pts in polys:
        pts = np.asarray(pts, dtype=float)
        for ln in lines:
            if len(pts) < 3:
                break
            base, nrm = _line_frame(ln)
            for rev in (False, True):
                q = pts[::-1] if rev else pts
                d = (q - base) @ nrm
                near = np.abs(d) < tol
                far = np.flatnonzero(~near)
                if not near[-1] or far.size == 0:
                    continue
                i = far[-1]
                cross = q[i + 1] - (d[i + 1] + np.sign(d[i]) * tol) * nrm
                q = np.vstack([q[: i + 1], cross])
                pts = q[::-1] if rev else q
        out.append(pts)
    return out


def clipped_segments(polys, lines, half):
    segs = [clip_polyline(p, half) for p in polys]
    for ln in lines:
        if hasattr(ln, "point_and_direction"):
            base, direction = ln.point_and_direction()
        else:
            base, direction = ln
        s = line_segment(np.asarray(base, float), np.asarray(direction, float), half)
        if s is not None:
            segs.append(np.array([s]))
    segs = [s for s in segs if len(s)]
    return np.concatenate(segs) if segs else np.zeros((0, 2, 2))


def arrangement_counts(polys, lines, half) -> tuple[EulerCount, int]:
    """(Euler data with the box edges included, bounded faces of the curves alone)."""
    curves = clipped_segments(polys, lines, half)
    tol = MERGE_REL * half
    box = box_segments(half)
    full = np.concatenate([curves, box]) if len(curves) else box
    inter = segment_intersections(full)
    verts, edges = planar_graph(full, tol, inter)
    total = euler_count(verts, edges)
    nc = len(curves)
    inner_inter = [x for x in inter if x[0] < nc and x[1] < nc]
    if nc:
        cv, ce = planar_graph(curves, tol, inner_inter)
        inner = euler_count(cv, ce).bounded_faces
    else:
        inner = 0
    return total, inner


def rasterize(segments, half, resolution) -> np.ndarray:
    """Boolean image, True on pixels crossed by a segment (8-connected Bresenham)."""
    img = np.zeros((resolution, resolution), dtype=bool)
    if len(segments) == 0:
        return img
    h = 2 * half / resolution
    ij = np.floor((np.asarray(segments) + half) / h).astype(int)
    np.clip(ij, 0, resolution - 1, out=ij)
    for (x0, y0), (x1, y1) in ij:
        rr, cc = draw_line(y0, x0, y1, x1)
        img[rr, cc] = True
    return img


def flood_fill(curve_img, min_pixels: int = 0):
    """Label free pixels 4-connectedly; returns (labels, n, bounded flags).

    Regions smaller than ``min_pixels`` are sub-resolution debris between
    nearly touching curves and are absorbed into the wall mask.
    """
    labels, n = ndimage.label(~curve_img)
    if min_pixels and n:
        sizes = np.bincount(labels.ravel(), minlength=n + 1)
        small = np.flatnonzero(sizes < min_pixels)
        small = small[small > 0]
        if small.size:
            labels[np.isin(labels, small)] = 0
            labels, n = ndimage.label(labels > 0)
    border = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    border = set(int(b) for b in border if b > 0)
    bounded = [k not in border for k in range(1, n + 1)]
    return labels, n, bounded


def _point_segment_distance(p, segs):
    if len(segs) == 0:
        return np.inf
    a, b = segs[:, 0], segs[:, 1]
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    s = np.where(dd > 0, np.einsum("ij,ij->i", p - a, d) / np.where(dd > 0, dd, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    proj = a + s[:, None] * d
    return float(np.sqrt(((proj - p) ** 2).sum(axis=1)).min())


def count_chambers(contour, window: float = DEFAULT_WINDOW, resolution: int = DEFAULT_RESOLUTION,
                   check_doubling: bool = True, min_pixels: int = 16) -> ChamberCount:
    """Chamber count of a completed signed contour inside ``[-window, window]^2``.

    A chamber is bounded (inner) when it does not touch the clip boundary.

    Raises
    ------
    WindowTooSmall
        If counting on the doubled window gives a different answer.
    """
    polys, lines = _pieces(contour)
    polys = snap_asymptotes(polys, lines, MERGE_REL * window)
    total, inner = arrangement_counts(polys, lines, window)
    doubled = None
    if check_doubling:
        t2, i2 = arrangement_counts(polys, lines, 2 * window)
        doubled = (t2.bounded_faces, i2)
        if doubled != (total.bounded_faces, inner):
            raise WindowTooSmall(
                f"window {window}: {total.bounded_faces} chambers ({inner} inner); "
                f"window {2 * window}: {doubled[0]} chambers ({doubled[1]} inner)"
            )

    segs = clipped_segments(polys, lines, window)
    img = rasterize(segs, window, resolution)
    labels, n, bounded = flood_fill(img, min_pixels)
    h = 2 * window / resolution
    dist = ndimage.distance_transform_edt(labels > 0)
    reps = []
    for k in range(1, n + 1):
        # max-clearance pixel of each region
        idx = ndimage.maximum_position(dist, labels, k)
        reps.append((np.array([idx[1], idx[0]]) * h - window + 0.5 * h, idx))
    # deterministic ids: order regions by representative point
    order = sorted(range(n), key=lambda k: (round(reps[k][0][0], 9), round(reps[k][0][1], 9)))
    relabel = np.zeros(n + 1, dtype=np.int32)
    for new, old in enumerate(order):
        relabel[old + 1] = new + 1
    labels = relabel[labels]
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    chambers = []
    for new, old in enumerate(order):
        rep = reps[old][0]
        chambers.append(
            Chamber(
                id=new,
                representative=rep,
                bounded=bounded[old],
                clearance=_point_segment_distance(rep, segs),
                area=float(sizes[new + 1]) * h * h,
            )
        )
    return ChamberCount(
        count=total.bounded_faces,
        inner=inner,
        chambers=chambers,
        arrangement=total,
        arrangement_inner=inner,
        raster_count=n,
        raster_inner=int(sum(bounded)),
        window=window,
        resolution=resolution,
        labels=labels,
        doubled=doubled,
    )


def steiner_regions(m: int) -> int:
    if m < 0:
        raise ValueError("line count must be non-negative")
    return m * (m - 1) // 2 + m + 1


def korben_bound(cusps: int) -> dict:
    l = int(cusps)
    return {"intersections": l * (l + 1) // 2 - (l + 1), "components": l * (l + 1) // 2 - l + 1}


def chamber_bound(n: int) -> int:
    return n * (n - 1) // 2 + 1


def isotopy_bound(n: int) -> int:
    return n * (n + 3) // 2 + 6


@dataclass
class HypothesisReport:
    pair_counts: dict
    self_intersections: dict
    violations: list
    cusp_sharing_hits: list
    near_tangent: list

    @property
    def ok(self) -> bool:
        return not self.violations and not self.cusp_sharing_hits


def _polyline_segments(points):
    p = np.asarray(points, dtype=float)
    return np.stack([p[:-1], p[1:]], axis=1) if len(p) > 1 else np.zeros((0, 2, 2))


def _angle(s1, s2):
    d1, d2 = s1[1] - s1[0], s2[1] - s2[0]
    c = abs(d1 @ d2) / (np.linalg.norm(d1) * np.linalg.norm(d2) + 1e-300)
    return float(np.arccos(min(1.0, c)))


def _dedupe(points, tol):
    out = []
    for p in points:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return out


def hypothesis_check(arcs, merge_tol: float = MERGE_REL * DEFAULT_WINDOW) -> HypothesisReport:
    """Pairwise intersection counts between smooth sub-arcs.

    Flags pairs meeting more than once, and pairs sharing a cusp that meet
    anywhere other than at the cusp.  A single polyline crossing itself is
    reported as a self-intersection and also counts as a violation.
    """
    polys = [np.asarray(a.points if hasattr(a, "points") else a, dtype=float) for a in arcs]
    segs = [_polyline_segments(p) for p in polys]
    pair_counts, selfx, violations, cusp_hits, tangent = {}, {}, [], [], []
    for i, s in enumerate(segs):
        hits = segment_intersections(s, skip_adjacent=lambda a, b: b - a <= 1)
        pts = _dedupe([p for _, _, p in hits], merge_tol)
        if pts:
            selfx[i] = len(pts)
            violations.append((i, i))
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            hits = segment_intersections(segs[i], segs[j])
            ends = [polys[i][0], polys[i][-1]]
            shared = [e for e in ends if min(np.linalg.norm(polys[j][0] - e), np.linalg.norm(polys[j][-1] - e)) <= merge_tol]
            pts = []
            for a, b, p in hits:
                if any(np.linalg.norm(p - e) <= merge_tol for e in shared):
                    continue
                pts.append(p)
                if _angle(segs[i][a], segs[j][b]) < NEAR_TANGENT:
                    tangent.append((i, j, tuple(p)))
            pts = _dedupe(pts, merge_tol)
            pair_counts[(i, j)] = len(pts)
            if len(pts) > 1:
                violations.append((i, j))
            if shared and pts:
                cusp_hits.append((i, j))
    return HypothesisReport(pair_counts, selfx, violations, cusp_hits, tangent)


@dataclass
class LineStep:
    added: int
    before: int
    after: int
    crossings: int

    @property
    def ok(self) -> bool:
        return self.after - self.before <= self.crossings + 1


def incremental_line_check(contour, window: float = DEFAULT_WINDOW) -> list[LineStep]:
    """Add facet lines one at a time; each may add at most (its crossings + 1) chambers."""
    polys, lines = _pieces(contour)
    polys = snap_asymptotes(polys, lines, MERGE_REL * window)
    steps = []
    before = arrangement_counts(polys, [], window)[0].bounded_faces
    for k in range(len(lines)):
        existing = clipped_segments(polys, lines[:k], window)
        new = clipped_segments([], [lines[k]], window)
        pts = _dedupe([p for _, _, p in segment_intersections(new, existing)], MERGE_REL * window)
        after = arrangement_counts(polys, lines[: k + 1], window)[0].bounded_faces
        steps.append(LineStep(added=k, before=before, after=after, crossings=len(pts)))
        before = after
    return steps


__all__ = [
    "Chamber",
    "ChamberCount",
    "HypothesisReport",
    "LineStep",
    "arrangement_counts",
    "chamber_bound",
    "count_chambers",
    "flood_fill",
    "hypothesis_check",
    "incremental_line_check",
    "isotopy_bound",
    "korben_bound",
    "rasterize",
    "snap_asymptotes",
    "steiner_regions",
]
