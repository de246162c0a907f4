"""Horn-Kapranov style parametrization and the reduced contour map.

``psi`` sends a projective parameter ``[lambda]`` and a shift ``y`` to the
coefficient vector ``(lambda B^T) * exp(-y A)``; ``xi`` is its image in
reduced coordinates ``(Log|lambda B^T|) B``.  The shift drops out of ``xi``
because the lifted matrix annihilates ``B``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import HyperplaneHit, NotACircuit, PyramidalCircuit
from .spectrum import NullBasis, Spectrum

HYPERPLANE_TOL = 1e-8


def _as_B(basis):
    return basis.B if isinstance(basis, NullBasis) else np.asarray(basis, dtype=float)


def linear_forms(lam, basis, tol: float = HYPERPLANE_TOL) -> np.ndarray:
    """Return ``lambda B^T``, raising :class:`HyperplaneHit` near ``H_A``."""
    B = _as_B(basis)
    lam = np.asarray(lam, dtype=float)
    forms = B @ lam
    bound = tol * np.linalg.norm(lam) * np.linalg.norm(B, axis=1)
    hit = np.flatnonzero(np.abs(forms) <= bound)
    if hit.size:
        i = int(hit[0])
        raise HyperplaneHit(i, float(abs(forms[i])))
    return forms


def psi(lam, y, basis, spec: Spectrum, tol: float = HYPERPLANE_TOL) -> np.ndarray:
    """Unit-norm representative of ``[(lambda B^T) * exp(-y A)]``.

    Computed in log space so large shifts do not overflow.
    """
    forms = linear_forms(lam, basis, tol)
    expo = -(np.asarray(y, dtype=float) @ spec.A)
    expo = expo - expo.max()
    v = forms * np.exp(expo)
    return v / np.linalg.norm(v)


def xi(lam, basis, tol: float = HYPERPLANE_TOL) -> np.ndarray:
    """Reduced contour point ``(log|lambda . beta_1|, ..., log|lambda . beta_t|) B``."""
    forms = linear_forms(lam, basis, tol)
    return np.log(np.abs(forms)) @ _as_B(basis)


def reduce_coefficients(c, basis) -> np.ndarray:
    """``(Log|c|) B`` for a coefficient vector (or a stack of them, one per row)."""
    c = np.asarray(c, dtype=float)
    if np.any(c == 0):
        raise ValueError("coefficients must be nonzero")
    return np.log(np.abs(c)) @ _as_B(basis)


def lift_reduced(v, basis, sigma=None) -> np.ndarray:
    """Minimum-norm coefficients ``c`` with ``(Log|c|) B = v`` and ``sign(c) = sigma``."""
    B = _as_B(basis)
    u = np.linalg.lstsq(B.T, np.asarray(v, dtype=float), rcond=None)[0]
    c = np.exp(u)
    if sigma is not None:
        c = c * np.asarray(sigma, dtype=float)
    return c


def canonical_sign(signs) -> tuple:
    """Sign tuple normalized so its first nonzero entry is +1."""
    s = np.sign(np.asarray(signs, dtype=float)).astype(int)
    nz = np.flatnonzero(s)
    if nz.size and s[nz[0]] < 0:
        s = -s
    return tuple(int(x) for x in s)


def orthant_sign(lam, basis, tol: float = HYPERPLANE_TOL) -> tuple:
    return canonical_sign(linear_forms(lam, basis, tol))


def sign_string(sigma) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in sigma)


def parse_sign(text: str) -> tuple:
    """``"+--++"`` -> canonical sign tuple."""
    text = text.strip()
    if not text or any(ch not in "+-" for ch in text):
        raise ValueError(f"sign class must be a string of '+'/'-', got {text!r}")
    return canonical_sign([1 if ch == "+" else -1 for ch in text])


def all_sign_classes(t: int) -> list[tuple]:
    """The ``2^(t-1)`` canonical sign classes, in lexicographic order of their strings."""
    out = []
    for bits in range(2 ** (t - 1)):
        tail = [(-1 if (bits >> (t - 2 - k)) & 1 else 1) for k in range(t - 1)]
        out.append((1, *tail))
    return out


@dataclass(frozen=True)
class CircuitResult:
    on_discriminant: bool
    residual: float
    sign_compatible: bool


def circuit_membership_test(c, b, tol: float = 1e-12) -> CircuitResult:
    """Decide ``[c]`` against a circuit discriminant.

    ``b`` generates the (one-dimensional) space of affine relations.  The
    product condition ``prod |c_j / b_j|^{b_j} = 1`` is checked as a sum of
    logs, ``sum_j b_j (log|c_j| - log|b_j|)``, together with
    ``sign(c) = +-sign(b)``.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim == 2:
        if b.shape[1] != 1:
            raise NotACircuit(f"nullspace has dimension {b.shape[1]}, expected 1")
        b = b[:, 0]
    c = np.asarray(c, dtype=float)
    if c.shape != b.shape:
        raise ValueError(f"coefficient length {c.size} does not match relation length {b.size}")
    if np.any(c == 0):
        raise ValueError("coefficients must be nonzero")
    if np.any(np.abs(b) <= tol * np.abs(b).max()):
        raise PyramidalCircuit("relation has a zero entry")
    residual = float(np.sum(b * (np.log(np.abs(c)) - np.log(np.abs(b)))))
    compatible = canonical_sign(c) == canonical_sign(b)
    return CircuitResult(abs(residual) <= tol and compatible, residual, compatible)


class EmptinessCase(enum.Enum):
    TRIVIAL_EMPTY = "trivial-empty"
    CIRCUIT = "circuit"
    GENERAL = "general"


def emptiness_case(spec: Spectrum, tol: float = 1e-10) -> EmptinessCase:
    from .spectrum import affine_dimension, build_lifted

    defect = spec.t - affine_dimension(build_lifted(spec), tol)
    if defect <= 1:
        return EmptinessCase.TRIVIAL_EMPTY
    if defect == 2:
        return EmptinessCase.CIRCUIT
    return EmptinessCase.GENERAL
