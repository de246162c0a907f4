"""Tracing the reduced contour when the parameter space is the projective line.

With ``t - d(A) - 1 = 2`` the reduced contour is the image of ``P^1`` minus
the ``t`` breakpoints ``lambda . beta_i = 0``.  Each open interval between
consecutive breakpoints carries one sign class and maps to one unbounded
arc; cusps split it into smooth, locally convex sub-arcs.

Inside an interval the parameter is written as a convex combination
``lambda = w_a u_a + w_b u_b`` of the two bounding breakpoint directions.
The linear forms are then ``w_a p + w_b q`` with the entries belonging to
the bounding breakpoints set to exactly zero, so the arc can be followed
out to ``w ~ 1e-300`` without cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .exceptions import DegenerateDerivative, InterpolationFailure, UnsupportedDimension
from .parametrization import HYPERPLANE_TOL, _as_B, canonical_sign, linear_forms, xi
from .roots import companion_real_roots, horner, real_roots, trim

ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class Breakpoint:
    theta: float
    index: int


@dataclass
class Sampling:
    """Tracing controls.

    ``clip_window`` is the half-width ``W`` of the square ``[-W, W]^2``.
    Arcs are followed until they leave ``extend * W`` for good, so that
    chamber counts can be re-checked on a window twice as large.
    """

    points_per_arc: int = 200
    clip_window: float = 8.0
    extend: float = 2.0
    max_step: float = 0.01
    max_turn: float = 0.15
    max_points: int = 100_000

    @property
    def trace_half_width(self) -> float:
        return self.extend * self.clip_window


@dataclass
class ContourArc:
    """Polyline sample of one smooth sub-arc of a signed contour."""

    sigma: tuple
    theta_range: tuple
    theta: np.ndarray
    lam: np.ndarray
    points: np.ndarray
    cusp_flags: tuple = (False, False)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class CuspSet:
    thetas: tuple
    polynomials: tuple = field(repr=False, default=())
    at_infinity: bool = False

    def __len__(self):
        return len(self.thetas)

    def __iter__(self):
        return iter(self.thetas)


def _require_planar(B):
    if B.ndim != 2 or B.shape[1] != 2:
        raise UnsupportedDimension(
            f"contour tracing needs a 2-column basis (t - d(A) - 1 = 2), got {B.shape[1]} columns"
        )


def _theta_of(vec):
    th = math.atan2(vec[1], vec[0]) % math.pi
    return 0.0 if th > math.pi - ANGLE_TOL else th


def breakpoints(basis) -> list[Breakpoint]:
    """Angles ``theta in [0, pi)`` with ``(cos theta, sin theta) . beta_i = 0``, sorted."""
    B = _as_B(basis)
    _require_planar(B)
    out = [Breakpoint(_theta_of((-b[1], b[0])), i) for i, b in enumerate(B)]
    return sorted(out, key=lambda bp: (bp.theta, bp.index))


def breakpoint_groups(basis, tol: float = ANGLE_TOL) -> list[tuple[float, tuple]]:
    """Distinct breakpoint directions with the row indices that share each one."""
    groups = []
    for bp in breakpoints(basis):
        if groups and bp.theta - groups[-1][0] <= tol:
            groups[-1][1].append(bp.index)
        else:
            groups.append((bp.theta, [bp.index]))
    if len(groups) > 1 and groups[0][0] + math.pi - groups[-1][0] <= tol:
        theta, idx = groups.pop()
        groups[0][1].extend(idx)
    return [(th, tuple(sorted(idx))) for th, idx in groups]


@dataclass(frozen=True)
class ParamInterval:
    """Open interval of ``P^1`` between two consecutive breakpoint directions."""

    theta_a: float
    theta_b: float
    rows_a: tuple
    rows_b: tuple
    u_a: np.ndarray
    u_b: np.ndarray
    p: np.ndarray
    q: np.ndarray
    sigma: tuple

    def forms(self, wa, wb):
        wa = np.asarray(wa, dtype=float)[..., None]
        wb = np.asarray(wb, dtype=float)[..., None]
        return wa * self.p + wb * self.q

    def lam(self, wa, wb):
        wa = np.asarray(wa, dtype=float)[..., None]
        wb = np.asarray(wb, dtype=float)[..., None]
        return wa * self.u_a + wb * self.u_b

    def weights_for(self, theta):
        """Convex weights ``(w_a, w_b)`` of the direction ``theta``, or None if outside."""
        M = np.column_stack([self.u_a, self.u_b])
        w = np.linalg.solve(M, [math.cos(theta), math.sin(theta)])
        if w[0] < 0 and w[1] < 0:
            w = -w
        if w[0] <= 0 or w[1] <= 0:
            return None
        return w / w.sum()


def param_intervals(basis) -> list[ParamInterval]:
    B = _as_B(basis)
    groups = breakpoint_groups(B)
    if len(groups) < 2:
        raise UnsupportedDimension("basis rows are all parallel; B does not have rank 2")
    out = []
    for k, (th_a, rows_a) in enumerate(groups):
        th_b, rows_b = groups[(k + 1) % len(groups)]
        if k + 1 == len(groups):
            th_b = th_b + math.pi
        u_a = np.array([math.cos(th_a), math.sin(th_a)])
        u_b = np.array([math.cos(th_b), math.sin(th_b)])
        p = B @ u_a
        q = B @ u_b
        p[list(rows_a)] = 0.0
        q[list(rows_b)] = 0.0
        mid = 0.5 * (p + q)
        out.append(ParamInterval(th_a, th_b, rows_a, rows_b, u_a, u_b, p, q, canonical_sign(mid)))
    return out


def attained_sign_classes(basis) -> list[tuple]:
    """Sign classes met by ``sign(lambda B^T)``, in breakpoint order around ``P^1``."""
    return [iv.sigma for iv in param_intervals(basis)]


# ---------------------------------------------------------------------------
# tracing


def _segment_hits_box(a, b, half):
    """Liang-Barsky test: does segment ab meet the square [-half, half]^2."""
    d = b - a
    t0, t1 = 0.0, 1.0
    for k in range(2):
        for pk, qk in ((-d[k], a[k] + half), (d[k], half - a[k])):
            if pk == 0:
                if qk < 0:
                    return False
            else:
                r = qk / pk
                if pk < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
                if t0 > t1:
                    return False
    return True


def _ray_misses_box(p, direction, half):
    if np.linalg.norm(direction) == 0:
        return False
    far = p + direction / np.linalg.norm(direction) * (4 * half + np.abs(p).max() + 1.0)
    return not _segment_hits_box(p, far, half)


def _points(iv, B, wa, wb):
    return np.log(np.abs(iv.forms(wa, wb))) @ B


def _end_ladder(iv, B, half, side):
    """Geometric ladder of weights toward one end of the interval.

    Stops once the image has left the box and, by the asymptotic form
    ``log(w) S + R``, can never come back.
    """
    rows = iv.rows_a if side == 0 else iv.rows_b
    other = iv.q if side == 0 else iv.p
    base = iv.p if side == 0 else iv.q
    S = B[list(rows)].sum(axis=0)
    mask = np.ones(len(base), bool)
    mask[list(rows)] = False
    ratio = np.max(np.abs(other[mask] / base[mask])) if mask.any() else 0.0
    small = []
    w = 0.25
    while w >= 1e-300:
        small.append(w)
        wa, wb = (1 - w, w) if side == 0 else (w, 1 - w)
        pt = _points(iv, B, wa, wb)
        if np.abs(pt).max() > half and w * ratio < 1e-6 and _ray_misses_box(pt, -S, half):
            break
        w *= 0.5
    return np.array(small)


def _refine(iv, B, wa, wb, sampling, half):
    diag = 2 * math.sqrt(2) * sampling.clip_window
    max_len = sampling.max_step * diag
    min_len = 1e-6 * diag
    for _ in range(60):
        pts = _points(iv, B, wa, wb)
        seg = np.diff(pts, axis=0)
        length = np.linalg.norm(seg, axis=1)
        split = np.zeros(len(seg), bool)
        for i in np.flatnonzero(length > max_len):
            if _segment_hits_box(pts[i], pts[i + 1], half):
                split[i] = True
        if len(seg) > 1:
            u = seg / np.maximum(length, 1e-300)[:, None]
            cosang = np.clip(np.sum(u[:-1] * u[1:], axis=1), -1, 1)
            turn = np.arccos(cosang)
            sharp = np.flatnonzero(turn > sampling.max_turn)
            inside = np.abs(pts[1:-1]).max(axis=1) <= half
            for i in sharp:
                if inside[i]:
                    split[i] |= length[i] > min_len
                    split[i + 1] |= length[i + 1] > min_len
        if not split.any() or len(wa) + split.sum() > sampling.max_points:
            break
        idx = np.flatnonzero(split)
        wa = np.insert(wa, idx + 1, 0.5 * (wa[idx] + wa[idx + 1]))
        wb = np.insert(wb, idx + 1, 0.5 * (wb[idx] + wb[idx + 1]))
    return wa, wb


def _sample_interval(iv, B, sampling):
    half = sampling.trace_half_width
    left = _end_ladder(iv, B, half, 0)
    right = _end_ladder(iv, B, half, 1)
    mid = np.linspace(0.25, 0.75, max(3, sampling.points_per_arc))[1:-1]
    wb = np.concatenate([left[::-1], mid, 1 - right])
    wa = np.concatenate([1 - left[::-1], 1 - mid, right])
    return _refine(iv, B, wa, wb, sampling, half)


def trace_interval(iv, basis, sampling=None, cusps=None) -> list[ContourArc]:
    """Sample one parameter interval and split it at the cusps it contains."""
    sampling = sampling or Sampling()
    B = _as_B(basis)
    wa, wb = _sample_interval(iv, B, sampling)
    cut = []
    for th in cusps or ():
        w = iv.weights_for(th)
        if w is not None:
            cut.append(w)
    cut.sort(key=lambda w: w[1])
    pieces = []
    start = 0
    key = wb / (wa + wb)
    flags_start = False
    for w in cut:
        pos = int(np.searchsorted(key, w[1]))
        wa = np.insert(wa, pos, w[0])
        wb = np.insert(wb, pos, w[1])
        key = np.insert(key, pos, w[1])
        pieces.append((start, pos + 1, flags_start, True))
        start, flags_start = pos, True
    pieces.append((start, len(wa), flags_start, False))

    pts = _points(iv, B, wa, wb)
    lam = iv.lam(wa, wb)
    lam = lam / np.linalg.norm(lam, axis=1)[:, None]
    theta = iv.theta_a + np.arctan2(
        lam @ np.array([-iv.u_a[1], iv.u_a[0]]), lam @ iv.u_a
    )
    arcs = []
    for lo, hi, f0, f1 in pieces:
        if hi - lo < 2:
            continue
        arcs.append(
            ContourArc(
                sigma=iv.sigma,
                theta_range=(float(theta[lo]), float(theta[hi - 1])),
                theta=theta[lo:hi].copy(),
                lam=lam[lo:hi].copy(),
                points=pts[lo:hi].copy(),
                cusp_flags=(f0, f1),
            )
        )
    return arcs


def trace_signed_contour(basis, sigma, sampling=None, cusps=None) -> list[ContourArc]:
    """Smooth sub-arcs of the signed contour for ``sigma`` (empty if unattained)."""
    B = _as_B(basis)
    _require_planar(B)
    sigma = canonical_sign(sigma)
    if len(sigma) != B.shape[0]:
        raise ValueError(f"sign class has length {len(sigma)}, expected {B.shape[0]}")
    if cusps is None:
        cusps = find_cusps(basis).thetas
    arcs = []
    for iv in param_intervals(B):
        if iv.sigma == sigma:
            arcs.extend(trace_interval(iv, B, sampling, cusps))
    return arcs


def trace_contour(basis, sampling=None) -> dict:
    """Every attained sign class mapped to its traced sub-arcs."""
    cusps = find_cusps(basis).thetas
    B = _as_B(basis)
    out = {}
    for iv in param_intervals(B):
        out.setdefault(iv.sigma, []).extend(trace_interval(iv, B, sampling, cusps))
    return out


# ---------------------------------------------------------------------------
# cusps


def cusp_polynomials(basis) -> tuple[np.ndarray, np.ndarray]:
    """Cleared-denominator derivatives of the two reduced coordinates.

    On the chart ``lambda = (1, s)``:
    ``p_k(s) = sum_i B_ik beta_i2 prod_{j != i} (beta_j1 + beta_j2 s)``.
    Coefficients ascending, length ``t``.
    """
    B = _as_B(basis)
    _require_planar(B)
    return tuple(_cleared(B, k, chart=1) for k in range(2))


def _cleared(B, k, chart):
    t = B.shape[0]
    total = np.zeros(t)
    other = 1 - chart
    for i in range(t):
        poly = np.array([B[i, k] * B[i, chart]])
        for j in range(t):
            if j != i:
                poly = P.polymul(poly, [B[j, other], B[j, chart]])
        total[: len(poly)] += poly
    return total


def leading_drop(coeffs) -> tuple[float, float]:
    """Relative size of the two highest-degree coefficients."""
    c = np.asarray(coeffs, dtype=float)
    scale = np.abs(c).max()
    if scale == 0:
        return (0.0, 0.0)
    return (abs(c[-1]) / scale, abs(c[-2]) / scale)


def find_cusps(basis, tol: float = 1e-8) -> CuspSet:
    """Parameters where both reduced coordinates are stationary.

    Because ``lambda . d(xi)/ds = sum_i beta_i2 = 0``, the two cleared
    derivatives satisfy ``p_1 = -s p_2`` and the common real roots are the
    real roots of ``p_2``.  The point at infinity ``[0:1]`` is checked on
    the swapped chart.
    """
    B = _as_B(basis)
    p1, p2 = cusp_polynomials(B)
    for k, p in enumerate((p1, p2)):
        if np.abs(p).max() <= tol * max(1.0, np.abs(B).max()) ** B.shape[0]:
            raise DegenerateDerivative(f"derivative polynomial p_{k + 1} vanishes identically")
    groups = breakpoint_groups(B)
    bp_thetas = [g[0] for g in groups]
    core = trim(p2, tol)
    thetas = []
    if core.size > 1:
        roots = real_roots(core)
        for s in roots:
            if abs(horner(p1, s)) > 1e-6 * np.abs(p1).max() * max(1.0, abs(s)) ** (len(p1) - 1):
                continue
            th = math.atan(s) % math.pi
            thetas.append(th)
    q1, q2 = (_cleared(B, k, chart=0) for k in range(2))
    qscale = max(np.abs(q1).max(), np.abs(q2).max())
    at_inf = abs(q1[0]) <= tol * qscale and abs(q2[0]) <= tol * qscale
    if at_inf:
        thetas.append(math.pi / 2)
    kept = []
    for th in sorted(thetas):
        near_bp = any(_pdist(th, b) < 1e-6 for b in bp_thetas)
        if not near_bp and not any(_pdist(th, k) < 1e-9 for k in kept):
            kept.append(th)
    return CuspSet(thetas=tuple(kept), polynomials=(p1, p2), at_infinity=at_inf and math.pi / 2 in kept)


def cusp_roots_crosscheck(basis, tol: float = 1e-8) -> np.ndarray:
    """Cusp angles from companion-matrix eigenvalues (independent of bisection)."""
    B = _as_B(basis)
    _, p2 = cusp_polynomials(B)
    bp = [g[0] for g in breakpoint_groups(B)]
    out = []
    for s in companion_real_roots(trim(p2, tol)):
        th = math.atan(s) % math.pi
        if all(_pdist(th, b) >= 1e-6 for b in bp):
            out.append(th)
    return np.sort(out)


def _pdist(a, b):
    """Distance between two angles on P^1 (period pi)."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


# ---------------------------------------------------------------------------
# Gauss map and singular locus


def verify_gauss_normal(basis, thetas, step: float = 1e-6, exclude: float = 1e-3, cusps=None):
    """Max of ``|tangent . lambda| / (|tangent| |lambda|)`` over the samples.

    Tangents are central differences of ``xi`` in ``theta``.  Samples within
    ``exclude`` of a breakpoint or cusp are skipped.  Returns
    ``(max_residual, samples_used)``.
    """
    B = _as_B(basis)
    if cusps is None:
        cusps = find_cusps(B).thetas
    avoid = [g[0] for g in breakpoint_groups(B)] + list(cusps)
    worst = 0.0
    used = 0
    for th in np.asarray(thetas, dtype=float):
        if any(_pdist(th, a) < exclude for a in avoid):
            continue
        lam = np.array([math.cos(th), math.sin(th)])
        fwd = xi([math.cos(th + step), math.sin(th + step)], B)
        bwd = xi([math.cos(th - step), math.sin(th - step)], B)
        tangent = (fwd - bwd) / (2 * step)
        norm = np.linalg.norm(tangent)
        if norm == 0:
            continue
        worst = max(worst, abs(tangent @ lam) / norm)
        used += 1
    return worst, used


def singular_locus_matrix(basis, lam, tol: float = HYPERPLANE_TOL) -> np.ndarray:
    """``M_km = sum_i B_ik B_im / (lambda . beta_i)``; the Jacobian of ``xi`` in ``lambda``."""
    B = _as_B(basis)
    forms = linear_forms(lam, B, tol)
    return (B / forms[:, None]).T @ B


def component_bound(t: int, d: int) -> int:
    k = t - d - 1
    deg = k * (t - 1)
    return deg * (2 * deg - 1) ** (2 * t - d - 2)


@dataclass(frozen=True)
class DegreeReport:
    degree_bound: int
    observed_degree: int
    identically_zero: bool
    minor_degree: int
    minor_bound: int
    component_bound: int


def _fit_degree(sample, values, max_deg, rel_tol):
    V = np.vander(sample, max_deg + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, values, rcond=None)
    resid = np.abs(V @ coef - values).max()
    scale = max(np.abs(values).max(), 1e-300)
    return coef, resid / scale


def r_polynomial_degree_check(basis, d: int | None = None, rel_tol: float = 1e-8) -> DegreeReport:
    """Interpolate the singular-locus polynomials on the chart ``lambda = (1, s)``.

    ``R = det M * prod(beta_i . lambda)^(t-d-1)`` vanishes identically on
    ``P^1`` since ``M lambda = 0`` always.  The informative polynomial is the
    cleared trace ``tr M * prod(beta_i . lambda)``, whose real roots (after
    removing the factor ``1 + s^2``) are the cusps.
    """
    B = _as_B(basis)
    _require_planar(B)
    t = B.shape[0]
    if d is None:
        d = t - 3
    k = t - d - 1
    bound = k * (t - 1)
    bp = [g[0] for g in breakpoint_groups(B)]
    s_all = np.linspace(-1.5, 1.5, 4 * bound + 9)
    s = np.array([x for x in s_all if all(_pdist(math.atan(x) % math.pi, b) > 1e-3 for b in bp)])
    if len(s) < bound + 3:
        raise InterpolationFailure("too few samples away from breakpoints")
    R_vals, T_vals, scale = [], [], []
    for x in s:
        lam = np.array([1.0, x])
        M = singular_locus_matrix(B, lam)
        prod = np.prod(B @ lam)
        R_vals.append(np.linalg.det(M) * prod**k)
        T_vals.append(np.trace(M) * prod)
        scale.append(np.abs(M).max() ** 2 * abs(prod) ** k)
    R_vals, T_vals = np.array(R_vals), np.array(T_vals)
    zero = np.abs(R_vals).max() <= rel_tol * max(scale)
    if zero:
        observed = -1
    else:
        coef, err = _fit_degree(s, R_vals, bound + 2, rel_tol)
        if err > 1e-6:
            raise InterpolationFailure(f"R samples inconsistent with degree <= {bound + 2}")
        observed = len(trim(coef, rel_tol)) - 1
    tcoef, terr = _fit_degree(s, T_vals, t + 1, rel_tol)
    if terr > 1e-6:
        raise InterpolationFailure("trace samples inconsistent with a polynomial")
    minor = len(trim(tcoef, 1e-7)) - 1
    return DegreeReport(bound, observed, bool(zero), minor, t - 1, component_bound(t, d))
