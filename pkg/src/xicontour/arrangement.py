"""Planar segment arrangements: clipping, exact intersection, Euler face counts.

Orientation tests run in floating point with Shewchuk's static error bound;
pairs the filter cannot decide are redone exactly with ``fractions.Fraction``
(every float is a dyadic rational, so this is exact on the input geometry).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

_ERRBOUND = 3.3306690738754716e-16


def clip_segment(a, b, half):
    """Clip ab to ``[-half, half]^2``; endpoints on the boundary are snapped onto it."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    t0, t1 = 0.0, 1.0
    for k in range(2):
        for pk, qk in ((-d[k], a[k] + half), (d[k], half - a[k])):
            if pk == 0:
                if qk < 0:
                    return None
            else:
                r = qk / pk
                if pk < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
                if t0 > t1:
                    return None
    p = a + t0 * d if t0 > 0 else a.copy()
    q = a + t1 * d if t1 < 1 else b.copy()
    for pt in (p, q):
        for k in range(2):
            if abs(abs(pt[k]) - half) <= 1e-12 * half:
                pt[k] = np.sign(pt[k]) * half
            pt[k] = min(max(pt[k], -half), half)
    return p, q


def clip_polyline(points, half):
    """Segments of a polyline inside the box, as an (m, 2, 2) array."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return np.zeros((0, 2, 2))
    inside = np.all(np.abs(pts) <= half, axis=1)
    both = inside[:-1] & inside[1:]
    segs = []
    for i in range(len(pts) - 1):
        if both[i]:
            segs.append((pts[i], pts[i + 1]))
            continue
        c = clip_segment(pts[i], pts[i + 1], half)
        if c is not None:
            segs.append(c)
    if not segs:
        return np.zeros((0, 2, 2))
    return np.array(segs, dtype=float)


def line_segment(base, direction, half):
    """The part of the line ``base + s * direction`` inside the box, or None."""
    reach = 4.0 * (half + np.abs(base).max() + 1.0)
    return clip_segment(base - reach * direction, base + reach * direction, half)


def box_segments(half):
    c = [(-half, -half), (half, -half), (half, half), (-half, half)]
    return np.array([(c[i], c[(i + 1) % 4]) for i in range(4)], dtype=float)


def _orient(a, b, c):
    left = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
    right = (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    return left - right, _ERRBOUND * (np.abs(left) + np.abs(right))


def _exact_intersections(p1, q1, p2, q2):
    """Intersection points of two closed segments, computed in exact arithmetic."""
    P1 = [Fraction(float(x)) for x in p1]
    Q1 = [Fraction(float(x)) for x in q1]
    P2 = [Fraction(float(x)) for x in p2]
    Q2 = [Fraction(float(x)) for x in q2]

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2 = orient(P1, Q1, P2), orient(P1, Q1, Q2)
    o3, o4 = orient(P2, Q2, P1), orient(P2, Q2, Q1)
    if o1 == 0 and o2 == 0:
        # collinear: overlap endpoints, if any
        pts = [c for c in (P2, Q2) if on_seg(P1, Q1, c)] + [c for c in (P1, Q1) if on_seg(P2, Q2, c)]
        out = []
        for c in pts:
            pt = (float(c[0]), float(c[1]))
            if pt not in out:
                out.append(pt)
        return out
    if (o1 > 0 and o2 > 0) or (o1 < 0 and o2 < 0) or (o3 > 0 and o4 > 0) or (o3 < 0 and o4 < 0):
        return []
    d1 = (Q1[0] - P1[0], Q1[1] - P1[1])
    d2 = (Q2[0] - P2[0], Q2[1] - P2[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        return []
    w = (P2[0] - P1[0], P2[1] - P1[1])
    s = (w[0] * d2[1] - w[1] * d2[0]) / den
    return [(float(P1[0] + s * d1[0]), float(P1[1] + s * d1[1]))]


def segment_intersections(segs_a, segs_b=None, skip_adjacent=None, chunk=512):
    """All intersection points between segment sets.

    Returns a list of ``(i, j, point)``.  With ``segs_b`` omitted the set is
    intersected with itself (``i < j``).  ``skip_adjacent(i, j)`` may veto
    pairs, e.g. consecutive segments of one polyline.
    """
    A = np.asarray(segs_a, dtype=float).reshape(-1, 2, 2)
    self_mode = segs_b is None
    Bs = A if self_mode else np.asarray(segs_b, dtype=float).reshape(-1, 2, 2)
    out = []
    if len(A) == 0 or len(Bs) == 0:
        return out
    amin, amax = A.min(axis=1), A.max(axis=1)
    bmin, bmax = Bs.min(axis=1), Bs.max(axis=1)
    for lo in range(0, len(A), chunk):
        hi = min(lo + chunk, len(A))
        ov = (
            (amin[lo:hi, None, 0] <= bmax[None, :, 0])
            & (bmin[None, :, 0] <= amax[lo:hi, None, 0])
            & (amin[lo:hi, None, 1] <= bmax[None, :, 1])
            & (bmin[None, :, 1] <= amax[lo:hi, None, 1])
        )
        ii, jj = np.nonzero(ov)
        ii = ii + lo
        if self_mode:
            keep = jj > ii
            ii, jj = ii[keep], jj[keep]
        if ii.size == 0:
            continue
        p1, q1, p2, q2 = A[ii, 0], A[ii, 1], Bs[jj, 0], Bs[jj, 1]
        o1, e1 = _orient(p1, q1, p2)
        o2, e2 = _orient(p1, q1, q2)
        o3, e3 = _orient(p2, q2, p1)
        o4, e4 = _orient(p2, q2, q1)
        sure = (np.abs(o1) > e1) & (np.abs(o2) > e2) & (np.abs(o3) > e3) & (np.abs(o4) > e4)
        apart = ((np.abs(o1) > e1) & (np.abs(o2) > e2) & (np.sign(o1) == np.sign(o2))) | (
            (np.abs(o3) > e3) & (np.abs(o4) > e4) & (np.sign(o3) == np.sign(o4))
        )
        cross = sure & ~apart
        for k in np.flatnonzero(cross):
            d1 = q1[k] - p1[k]
            d2 = q2[k] - p2[k]
            den = d1[0] * d2[1] - d1[1] * d2[0]
            w = p2[k] - p1[k]
            s = (w[0] * d2[1] - w[1] * d2[0]) / den
            i, j = int(ii[k]), int(jj[k])
            if skip_adjacent is not None and skip_adjacent(i, j):
                continue
            out.append((i, j, p1[k] + s * d1))
        for k in np.flatnonzero(~sure & ~apart):
            i, j = int(ii[k]), int(jj[k])
            if skip_adjacent is not None and skip_adjacent(i, j):
                continue
            for pt in _exact_intersections(p1[k], q1[k], p2[k], q2[k]):
                out.append((i, j, np.array(pt)))
    return out


@dataclass
class EulerCount:
    vertices: int
    edges: int
    components: int

    @property
    def bounded_faces(self) -> int:
        return self.edges - self.vertices + self.components


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def planar_graph(segments, merge_tol, intersections=None):
    """Subdivide segments at their mutual intersections and merge close vertices.

    Intersection points within ``merge_tol`` of each other or of a segment
    endpoint are identified.  Segment endpoints are identified only when
    they coincide, since sample points on the two branches at a cusp may
    be closer than ``merge_tol`` without the branches meeting.

    Returns ``(vertices, edges)`` with edges as a sorted array of unique
    vertex-index pairs.
    """
    segs = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
    if len(segs) == 0:
        return np.zeros((0, 2)), np.zeros((0, 2), dtype=int)
    if intersections is None:
        intersections = segment_intersections(segs)
    on_seg = [[] for _ in range(len(segs))]
    pts = [segs[:, 0], segs[:, 1]]
    extra = []
    for i, j, p in intersections:
        idx = 2 * len(segs) + len(extra)
        extra.append(p)
        on_seg[i].append(idx)
        on_seg[j].append(idx)
    allpts = np.vstack(pts + ([np.array(extra)] if extra else []))
    uf = _UnionFind(len(allpts))
    n_end = 2 * len(segs)
    exact = 1e-12 * max(1.0, float(np.abs(allpts).max()))
    tree = cKDTree(allpts)
    # sample vertices merge only when they coincide: at a cusp the two
    # branches come closer than merge_tol without meeting
    for a, b in tree.query_pairs(exact):
        uf.union(a, b)
    if len(allpts) > n_end:
        ends = cKDTree(allpts[:n_end])
        dist, near = ends.query(allpts[n_end:], distance_upper_bound=merge_tol)
        free = []
        for k, (dk, nk) in enumerate(zip(dist, near)):
            if np.isfinite(dk):
                uf.union(n_end + k, int(nk))
            if not dk <= exact:
                free.append(n_end + k)
        # crossings that are not just shared endpoints snap to one another
        if len(free) > 1:
            for a, b in cKDTree(allpts[free]).query_pairs(merge_tol):
                uf.union(free[a], free[b])
    roots = np.array([uf.find(k) for k in range(len(allpts))])
    uniq, vid = np.unique(roots, return_inverse=True)
    verts = allpts[uniq]
    edges = set()
    for s in range(len(segs)):
        p, q = segs[s]
        d = q - p
        dd = d @ d
        ids = [s, len(segs) + s] + on_seg[s]
        params = [0.0, 1.0] + [((allpts[k] - p) @ d) / dd if dd > 0 else 0.0 for k in on_seg[s]]
        order = np.argsort(params, kind="stable")
        chain = [int(vid[ids[k]]) for k in order]
        for a, b in zip(chain[:-1], chain[1:]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
    edges = np.array(sorted(edges), dtype=int).reshape(-1, 2)
    return verts, edges


def euler_count(verts, edges) -> EulerCount:
    if len(edges) == 0:
        return EulerCount(0, 0, 0)
    used = np.unique(edges)
    remap = -np.ones(len(verts), dtype=int)
    remap[used] = np.arange(len(used))
    e = remap[edges]
    g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(len(used), len(used)))
    ncomp, _ = connected_components(g, directed=False)
    return EulerCount(len(used), len(e), int(ncomp))
