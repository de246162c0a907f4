"""Real root isolation for small dense polynomials.

Coefficients are in ascending order (``c[0] + c[1] x + ...``), matching
``numpy.polynomial.polynomial``.  Roots are bracketed between consecutive
critical points (found recursively) and refined by bisection on sign
changes, with Horner evaluation throughout.
"""
from __future__ import annotations

import numpy as np


def horner(coeffs, x):
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def trim(coeffs, rel_tol: float = 0.0) -> np.ndarray:
    """Drop leading (highest-degree) coefficients at or below ``rel_tol * max|c|``."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        return c
    scale = np.abs(c).max()
    if scale == 0:
        return c[:0]
    k = c.size
    while k > 0 and abs(c[k - 1]) <= rel_tol * scale:
        k -= 1
    return c[:k]


def cauchy_bound(coeffs) -> float:
    c = trim(coeffs)
    if c.size <= 1:
        return 1.0
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1])))


def _bisect(coeffs, lo, hi, flo, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = horner(coeffs, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _roots_in(coeffs, lo, hi, zero_tol):
    deg = coeffs.size - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -coeffs[0] / coeffs[1]
        return [r] if lo <= r <= hi else []
    deriv = coeffs[1:] * np.arange(1, deg + 1)
    crit = _roots_in(deriv, lo, hi, zero_tol)
    knots = [lo, *crit, hi]
    vals = [float(horner(coeffs, k)) for k in knots]
    mags = np.abs(coeffs)
    roots = []
    for i in range(len(knots) - 1):
        a, b = knots[i], knots[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            roots.append(a)
        elif fb != 0 and (fa > 0) != (fb > 0):
            roots.append(_bisect(coeffs, a, b, fa))
    if vals[-1] == 0:
        roots.append(knots[-1])
    # tangential (even-multiplicity) roots sit at critical points
    for k, v in zip(crit, vals[1:-1]):
        if abs(v) <= zero_tol * float(horner(mags, abs(k))):
            roots.append(k)
    roots.sort()
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-12 * max(1.0, abs(r)):
            out.append(r)
    return out


def real_roots(coeffs, rel_tol: float = 1e-12, zero_tol: float = 1e-13) -> np.ndarray:
    """All real roots of a polynomial, sorted.

    Leading coefficients below ``rel_tol`` (relative) are treated as zero.
    Raises ``ValueError`` for the zero polynomial.
    """
    c = trim(coeffs, rel_tol)
    if c.size == 0:
        raise ValueError("zero polynomial has no isolated roots")
    c = c / np.abs(c).max()
    M = cauchy_bound(c)
    return np.array(_roots_in(c, -M, M, zero_tol))


def companion_real_roots(coeffs, rel_tol: float = 1e-12, imag_tol: float = 1e-7) -> np.ndarray:
    """Eigenvalue-based real roots; an independent cross-check for :func:`real_roots`."""
    c = trim(coeffs, rel_tol)
    if c.size <= 1:
        return np.array([])
    r = np.polynomial.polynomial.polyroots(c)
    scale = np.maximum(1.0, np.abs(r))
    return np.sort(r[np.abs(r.imag) <= imag_tol * scale].real)


def deflate(coeffs, root) -> np.ndarray:
    """Synthetic division by ``(x - root)``; returns the quotient (ascending)."""
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    q = np.zeros(n)
    acc = 0.0
    for k in range(n, 0, -1):
        acc = c[k] + acc * root
        q[k - 1] = acc
    return q
