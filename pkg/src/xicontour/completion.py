"""Completed contours: facet lines contributed by non-simplicial faces.

When a face of the Newton polytope carries more points than a simplex, roots
can escape to infinity through that face without any singularity in
``R^n``.  For ``t = n + 3`` each such face with a one-dimensional relation
space contributes an affine line in reduced coordinates.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .contour import ContourArc, Sampling, breakpoint_groups, trace_signed_contour
from .exceptions import InconsistentLift
from .parametrization import _as_B, canonical_sign
from .polytope import Face, face_for_weight, face_lattice
from .spectrum import (
    DEFAULT_TOL,
    Spectrum,
    affine_dimension,
    build_lifted,
    nullspace_basis,
)


@dataclass(frozen=True)
class NonSimplicialFace:
    face: Face
    sub_basis: np.ndarray
    line_normal: np.ndarray | None
    line_offset: float | None

    @property
    def members(self):
        return self.face.members


@dataclass(frozen=True)
class FacetLine:
    """The line ``{v : v . normal = offset}`` in reduced coordinates."""

    normal: np.ndarray
    offset: float
    admissible: bool
    members: tuple
    relation: np.ndarray = field(repr=False)

    def point_and_direction(self):
        nn = self.normal @ self.normal
        base = self.normal * (self.offset / nn)
        direction = np.array([-self.normal[1], self.normal[0]]) / np.sqrt(nn)
        return base, direction

    def side(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self.normal - self.offset


@dataclass
class CompletedContour:
    sigma: tuple
    arcs: list
    lines: list
    warnings: list = field(default_factory=list)

    @property
    def empty(self):
        return not self.arcs and not self.lines


def face_lattice_of(spec: Spectrum, tol: float = 1e-9) -> list[Face]:
    return face_lattice(spec, tol)


def non_simplicial_faces(spec: Spectrum, basis=None, tol: float = DEFAULT_TOL) -> list[NonSimplicialFace]:
    """Proper faces holding at least ``dim + 2`` spectrum points.

    Each comes with a basis of the affine relations among its points (the
    nullspace of its own lifted matrix).  If ``basis`` is given, circuit
    faces also carry their facet line.
    """
    d = affine_dimension(build_lifted(spec), tol)
    out = []
    for face in face_lattice(spec):
        if face.dim > d - 1 or len(face.members) < face.dim + 2:
            continue
        sub = Spectrum(spec.A[:, list(face.members)])
        sub_basis = nullspace_basis(build_lifted(sub), tol).B
        ns = NonSimplicialFace(face, sub_basis, None, None)
        if basis is not None and sub_basis.shape[1] == 1:
            line = facet_line(ns, basis)
            ns = replace(ns, line_normal=line.normal, line_offset=line.offset)
        out.append(ns)
    return out


def count_faces_by_threshold(spec: Spectrum, tol: float = DEFAULT_TOL) -> dict:
    """Proper lower-dimensional faces with ``>= dim + 1`` and with ``>= dim + 2`` points."""
    d = affine_dimension(build_lifted(spec), tol)
    faces = [f for f in face_lattice(spec) if f.dim <= d - 1]
    return {
        "at_least_dim_plus_1": sum(len(f.members) >= f.dim + 1 for f in faces),
        "at_least_dim_plus_2": sum(len(f.members) >= f.dim + 2 for f in faces),
    }


def facet_line(ns_face: NonSimplicialFace, basis, sigma=None, tol: float = 1e-8) -> FacetLine | None:
    """Line contributed by a circuit face, or None when the face is not a circuit.

    The face relation ``b^w`` is padded with zeros to ``e^w``, which is an
    affine relation of the whole point set, so ``e^w = B mu`` has an exact
    solution.  The line is ``v . mu = sum_i b^w_i log|b^w_i|``.  With a
    sign class given, ``admissible`` records whether ``sigma`` restricted to
    the face equals ``+-sign(b^w)``.
    """
    B = _as_B(basis)
    bw = ns_face.sub_basis
    if bw.shape[1] != 1:
        warnings.warn(
            f"face {ns_face.members} has {bw.shape[1]} independent relations; no line produced",
            stacklevel=2,
        )
        return None
    # scale the relation so its smallest entry is +-1 and its first entry positive
    bw = bw[:, 0] / np.abs(bw[:, 0]).min()
    if bw[0] < 0:
        bw = -bw
    members = list(ns_face.members)
    e = np.zeros(B.shape[0])
    e[members] = bw
    mu, *_ = np.linalg.lstsq(B, e, rcond=None)
    resid = np.abs(B @ mu - e).max()
    if resid > tol:
        raise InconsistentLift(f"face {ns_face.members}: |B mu - e| = {resid:.2e}")
    offset = float(np.sum(bw * np.log(np.abs(bw))))
    admissible = True
    if sigma is not None:
        admissible = canonical_sign(np.asarray(sigma)[members]) == canonical_sign(bw)
    return FacetLine(normal=mu, offset=offset, admissible=admissible, members=tuple(members), relation=e)


def facet_lines(spec: Spectrum, basis, sigma=None) -> list[FacetLine]:
    out = []
    for ns in non_simplicial_faces(spec):
        line = facet_line(ns, basis, sigma)
        if line is not None:
            out.append(line)
    return out


def completed_signed_contour(spec: Spectrum, basis, sigma, sampling: Sampling | None = None,
                             cusps=None) -> CompletedContour:
    """Signed contour arcs plus the sign-admissible facet lines."""
    B = _as_B(basis)
    sigma = canonical_sign(sigma)
    arcs = trace_signed_contour(B, sigma, sampling, cusps)
    notes = []
    all_lines = facet_lines(spec, B, sigma)
    lines = [ln for ln in all_lines if ln.admissible]
    if spec.t == spec.n + 3 and len(all_lines) == 2:
        distinct = len(breakpoint_groups(B))
        if distinct != spec.n + 1:
            notes.append(
                f"two non-simplicial facets but {distinct} distinct breakpoints (expected {spec.n + 1})"
            )
    if len(lines) > spec.t - affine_dimension(build_lifted(spec)) - 1:
        notes.append("more facet lines than t - d(A) - 1")
    return CompletedContour(sigma=sigma, arcs=arcs, lines=lines, warnings=notes)


def initial_term(c, spec: Spectrum, w, tol: float = 1e-9) -> dict:
    """Terms of ``g`` supported on the face of the hull with inner normal ``w``."""
    w = np.asarray(w, dtype=float)
    if not np.any(w):
        raise ValueError("weight must be nonzero")
    idx = face_for_weight(spec, w, tol)
    c = np.asarray(c, dtype=float)
    return {"indices": idx, "coefficients": tuple(float(c[i]) for i in idx)}


__all__ = [
    "CompletedContour",
    "ContourArc",
    "FacetLine",
    "NonSimplicialFace",
    "completed_signed_contour",
    "count_faces_by_threshold",
    "face_lattice_of",
    "facet_line",
    "facet_lines",
    "initial_term",
    "non_simplicial_faces",
]
