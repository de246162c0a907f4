"""Face lattice of the convex hull of a small point set (ambient dimension <= 3).

Facets are found by brute force over affinely independent subsets, which is
plenty for the dozen-or-so points a spectrum carries.  Lower-dimensional
faces are intersections of facets.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exceptions import UnsupportedDimension

MAX_DIM = 3


@dataclass(frozen=True)
class Face:
    """A proper face ``{x : x . w = min}`` of the hull, with ``w`` an inner normal."""

    inner_normal: np.ndarray
    members: tuple
    dim: int

    def __repr__(self):
        w = np.array2string(np.asarray(self.inner_normal), precision=4)
        return f"Face(dim={self.dim}, members={self.members}, inner_normal={w})"


def _affine_frame(points, tol):
    center = points.mean(axis=0)
    centered = points - center
    if centered.size == 0:
        return center, np.zeros((points.shape[1], 0))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.abs(points).max()))
    r = int(np.sum(s > tol * scale * max(1, len(points))))
    return center, vt[:r].T


def affine_rank(points, tol=1e-9) -> int:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) <= 1:
        return 0
    return _affine_frame(points, tol)[1].shape[1]


def _facets(coords, tol):
    """Facets of the full-dimensional hull of ``coords`` (t x d) as (normal, members)."""
    t, d = coords.shape
    if d == 1:
        x = coords[:, 0]
        lo = tuple(int(i) for i in np.flatnonzero(x <= x.min() + tol))
        hi = tuple(int(i) for i in np.flatnonzero(x >= x.max() - tol))
        return [(np.array([1.0]), lo), (np.array([-1.0]), hi)]
    found = {}
    for subset in combinations(range(t), d):
        P = coords[list(subset)]
        diffs = P[1:] - P[0]
        _, s, vt = np.linalg.svd(diffs, full_matrices=True)
        if s[-1] <= tol * max(1.0, s[0]):
            continue
        normal = vt[-1]
        vals = coords @ normal
        h = vals[subset[0]]
        if np.all(vals >= h - tol):
            inner = normal
        elif np.all(vals <= h + tol):
            inner, vals, h = -normal, -vals, -h
        else:
            continue
        members = tuple(int(i) for i in np.flatnonzero(np.abs(vals - h) <= tol))
        found.setdefault(frozenset(members), (inner, members))
    return list(found.values())


def face_lattice(spec, tol: float = 1e-9) -> list[Face]:
    """All proper non-empty faces of ``Conv{a_1..a_t}``.

    Raises
    ------
    UnsupportedDimension
        For ambient dimension above 3.
    """
    A = np.asarray(spec.A if hasattr(spec, "A") else spec, dtype=float)
    n, t = A.shape
    if n > MAX_DIM:
        raise UnsupportedDimension(f"face lattice supports n <= {MAX_DIM}, got n = {n}")
    points = A.T
    center, U = _affine_frame(points, tol)
    d = U.shape[1]
    if d == 0:
        return []
    coords = (points - center) @ U
    scale = max(1.0, float(np.abs(coords).max()))
    facet_list = _facets(coords, tol * scale)

    faces = {frozenset(m) for _, m in facet_list}
    frontier = list(faces)
    while frontier:
        new = []
        for a in frontier:
            for _, b in facet_list:
                inter = a & frozenset(b)
                if inter and inter not in faces:
                    faces.add(inter)
                    new.append(inter)
        frontier = new

    out = []
    for members in faces:
        normals = [nrm for nrm, m in facet_list if members <= frozenset(m)]
        w_local = np.sum([nrm / np.linalg.norm(nrm) for nrm in normals], axis=0)
        w = U @ w_local
        idx = tuple(sorted(members))
        out.append(Face(inner_normal=w, members=idx, dim=affine_rank(points[list(idx)], tol)))
    out.sort(key=lambda f: (f.dim, f.members))
    return out


def face_for_weight(spec, w, tol: float = 1e-9) -> tuple:
    """Indices of the columns minimizing ``a_j . w``."""
    A = np.asarray(spec.A if hasattr(spec, "A") else spec, dtype=float)
    vals = np.asarray(w, dtype=float) @ A
    span = max(1.0, float(np.abs(vals).max()))
    return tuple(int(i) for i in np.flatnonzero(vals <= vals.min() + tol * span))
