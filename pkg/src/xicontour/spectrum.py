"""Exponent matrices, their lifted form, and the affine-relation basis.

A spectrum is an ``n x t`` real matrix whose columns are the exponent
vectors of an exponential sum ``g(y) = sum_j c_j exp(a_j . y)``.  Everything
downstream works in the coordinates given by a basis ``B`` of the right
nullspace of the lifted matrix (a row of ones stacked on top of ``A``).
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import DefectiveWarning, DegenerateNullspace, SpectrumError

DEFAULT_TOL = 1e-10
ROW_TOL = 1e-8

_NUMBER = r"\d+(?:\.\d*)?|\.\d+"
_SQRT_RE = re.compile(
    rf"^(?P<sign>[+-]?)\s*(?:(?P<coef>{_NUMBER})\s*\*\s*)?sqrt\(\s*(?P<arg>{_NUMBER})\s*\)$"
)


def parse_entry(value) -> float:
    """Parse one exponent: a number, a decimal or ``p/q`` string, or ``sqrt(k)``.

    ``sqrt`` may carry a sign and a numeric factor, e.g. ``-3*sqrt(2)``.
    """
    if isinstance(value, bool):
        raise SpectrumError(f"boolean is not a valid exponent: {value!r}")
    if isinstance(value, (int, float, np.integer, np.floating)):
        out = float(value)
    elif isinstance(value, str):
        text = value.strip().lower().replace(" ", "")
        m = _SQRT_RE.match(text)
        if m:
            coef = float(m.group("coef")) if m.group("coef") else 1.0
            out = coef * math.sqrt(float(m.group("arg")))
            if m.group("sign") == "-":
                out = -out
        else:
            try:
                out = float(Fraction(text))
            except (ValueError, ZeroDivisionError):
                raise SpectrumError(f"cannot parse exponent {value!r}") from None
    else:
        raise SpectrumError(f"unsupported exponent type {type(value).__name__}")
    if not math.isfinite(out):
        raise SpectrumError(f"exponent {value!r} is not finite")
    return out


@dataclass(frozen=True)
class Spectrum:
    """Exponent matrix with distinct columns.

    Build with :meth:`from_rows` to accept string entries such as ``"sqrt(2)"``.
    """

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim == 1:
            A = A[None, :]
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise SpectrumError(f"spectrum must be a non-empty 2-D matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise SpectrumError("spectrum entries must be finite")
        cols = [tuple(col) for col in A.T]
        if len(set(cols)) != len(cols):
            seen = {}
            for j, col in enumerate(cols):
                if col in seen:
                    raise SpectrumError(f"columns {seen[col] + 1} and {j + 1} coincide")
                seen[col] = j
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @classmethod
    def from_rows(cls, rows) -> "Spectrum":
        if isinstance(rows, (str, bytes)) or not hasattr(rows, "__iter__"):
            raise SpectrumError("spectrum must be a list of rows")
        rows = list(rows)
        if rows and (isinstance(rows[0], str) or not hasattr(rows[0], "__iter__")):
            rows = [rows]
        parsed = [[parse_entry(v) for v in row] for row in rows]
        widths = {len(r) for r in parsed}
        if len(widths) != 1:
            raise SpectrumError(f"ragged spectrum rows (lengths {sorted(widths)})")
        return cls(np.array(parsed, dtype=float))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def t(self) -> int:
        return self.A.shape[1]

    @property
    def columns(self) -> np.ndarray:
        return self.A.T


@dataclass(frozen=True)
class NullBasis:
    """Orthonormal basis ``B`` (t x k) of the right nullspace of the lifted matrix.

    Rows of ``B`` are the vectors ``beta_i``; they define the hyperplane
    arrangement on the projective parameter space.
    """

    B: np.ndarray
    residual: float
    orthonormal: bool = True
    tol: float = DEFAULT_TOL

    @property
    def t(self) -> int:
        return self.B.shape[0]

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    @property
    def rows(self) -> np.ndarray:
        return self.B


@dataclass(frozen=True)
class SpectrumReport:
    d: int
    pyramidal: bool
    combinatorially_simplicial: bool | None
    circuit_defect: int
    warnings: tuple = field(default_factory=tuple)

    @property
    def plausibly_nondefective(self) -> bool:
        return not self.pyramidal and self.circuit_defect >= 2


def build_lifted(spec: Spectrum) -> np.ndarray:
    """Stack a row of ones on top of ``spec.A``."""
    return np.vstack([np.ones(spec.t), spec.A])


def _svd(lifted):
    lifted = np.asarray(lifted, dtype=float)
    _, s, vt = np.linalg.svd(lifted, full_matrices=True)
    return s, vt


def _rank(s, tol):
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def affine_dimension(lifted, tol: float = DEFAULT_TOL) -> int:
    s, _ = _svd(lifted)
    return _rank(s, tol) - 1


def nullspace_basis(lifted, tol: float = DEFAULT_TOL) -> NullBasis:
    """Orthonormal right-nullspace basis via SVD, rank cut at ``tol * s_max``.

    Raises
    ------
    DegenerateNullspace
        If the lifted matrix has full column rank.
    """
    lifted = np.asarray(lifted, dtype=float)
    s, vt = _svd(lifted)
    r = _rank(s, tol)
    B = vt[r:].T.copy()
    if B.shape[1] == 0:
        raise DegenerateNullspace(
            f"lifted matrix has full column rank {r}; no affine relations among the columns"
        )
    residual = float(np.max(np.abs(lifted @ B)))
    B.setflags(write=False)
    return NullBasis(B=B, residual=residual, tol=tol)


def basis_for(spec: Spectrum, tol: float = DEFAULT_TOL) -> NullBasis:
    return nullspace_basis(build_lifted(spec), tol)


def is_pyramidal(basis: NullBasis | None, tol: float = ROW_TOL) -> bool:
    """A spectrum is pyramidal exactly when ``B`` has a zero row."""
    if basis is None or basis.dim == 0:
        return False
    return bool(np.any(np.linalg.norm(basis.B, axis=1) <= tol))


def is_combinatorially_simplicial(spec: Spectrum, tol: float = 1e-9) -> bool:
    """True iff every proper face of the hull holds exactly ``1 + dim`` points."""
    from .polytope import face_lattice

    return all(len(f.members) == f.dim + 1 for f in face_lattice(spec, tol=tol))


def analyze(spec: Spectrum, tol: float = DEFAULT_TOL, assert_nondefective=None) -> SpectrumReport:
    """Summarize dimension and structural flags.

    Non-defectiveness is not decided here.  When the necessary conditions
    fail (pyramidal, or ``t - d < 2``) a :class:`DefectiveWarning` is issued,
    louder if the caller asserted non-defectiveness anyway.
    """
    lifted = build_lifted(spec)
    d = affine_dimension(lifted, tol)
    try:
        basis = nullspace_basis(lifted, tol)
    except DegenerateNullspace:
        basis = None
    pyr = is_pyramidal(basis)
    simplicial = is_combinatorially_simplicial(spec) if spec.n <= 3 else None
    notes = []
    if pyr:
        notes.append("pyramidal: some column is off the affine span of the others")
    if spec.t - d < 2:
        notes.append("t - d(A) < 2: the discriminant is empty")
    for note in notes:
        msg = note + (" (non-defectiveness was asserted)" if assert_nondefective else "")
        warnings.warn(msg, DefectiveWarning, stacklevel=2)
    return SpectrumReport(
        d=d,
        pyramidal=pyr,
        combinatorially_simplicial=simplicial,
        circuit_defect=spec.t - d,
        warnings=tuple(notes),
    )
