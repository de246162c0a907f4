"""Zero sets of real exponential sums in one or two variables.

This is the numeric side of the story: given coefficients, look at the
actual zero set and summarize its topology by (components, compact
components).  Compactness is judged through the moment map, which sends
``R^n`` onto the interior of the Newton polytope, so escaping to infinity
means approaching its boundary.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull
from scipy.special import softmax
from skimage.measure import find_contours

from .exceptions import ConstancyViolation, ResolutionWarning, UnsupportedDimension
from .parametrization import _as_B, canonical_sign, lift_reduced
from .spectrum import Spectrum, build_lifted


@dataclass(frozen=True)
class ExpSum:
    """``g(y) = sum_j c_j exp(a_j . y)``."""

    spectrum: Spectrum
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        if c.shape != (self.spectrum.t,):
            raise ValueError(f"expected {self.spectrum.t} coefficients, got {c.size}")
        if np.any(c == 0) or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite and nonzero")
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.spectrum.n

    @property
    def sign(self) -> tuple:
        return canonical_sign(np.sign(self.c))

    def __call__(self, y):
        return eval_exp_sum(self, y)


def _exponents(g: ExpSum, y):
    y = np.asarray(y, dtype=float)
    if g.n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    return y @ g.spectrum.A + np.log(np.abs(g.c))


def scaled_eval(g: ExpSum, y):
    """``g(y) / max_j |c_j e^{a_j . y}|``: same sign and zeros as ``g``, never overflows."""
    y = np.asarray(y, dtype=float)
    if g.n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    logc = np.log(np.abs(g.c))
    # term by term keeps the work on contiguous arrays for large grids
    terms = [y @ g.spectrum.A[:, j] + logc[j] for j in range(g.spectrum.t)]
    m = np.maximum.reduce(terms)
    out = np.zeros_like(m)
    for j, e in enumerate(terms):
        out += np.sign(g.c[j]) * np.exp(e - m)
    return out


def eval_exp_sum(g: ExpSum, y):
    e = _exponents(g, y)
    m = e.max(axis=-1)
    return scaled_eval(g, y) * np.exp(m)


def moment_map(spec: Spectrum, y) -> np.ndarray:
    """``sum_j e^{a_j . y} a_j / sum_j e^{a_j . y}``, computed as a softmax average."""
    A = spec.A
    y = np.asarray(y, dtype=float)
    if spec.n == 1 and (y.ndim == 0 or y.shape[-1] != 1):
        y = y[..., None]
    return softmax(y @ A, axis=-1) @ A.T


def _boundary_distance(spec: Spectrum):
    """Function giving the distance from points of Conv(A) to its boundary."""
    pts = spec.A.T
    if spec.n == 1:
        lo, hi = pts.min(), pts.max()
        return lambda x: np.minimum(x[..., 0] - lo, hi - x[..., 0])
    hull = ConvexHull(pts)
    eq = hull.equations
    return lambda x: (-(x @ eq[:, :-1].T + eq[:, -1])).min(axis=-1)


def _diameter(spec: Spectrum) -> float:
    pts = spec.A.T
    return float(max(np.linalg.norm(p - q) for p, q in combinations(pts, 2)))


@dataclass(frozen=True, order=True)
class TopologySignature:
    components: int
    compact: int

    def as_tuple(self):
        return (self.components, self.compact)


def tropical_radius(g: ExpSum) -> float:
    """Largest norm of a point where ``n + 1`` terms of ``g`` tie in magnitude.

    The zero set is within bounded distance of the tropical curve, so this
    sets the scale of the box that must be searched.
    """
    A = g.spectrum.A
    n = g.n
    logc = np.log(np.abs(g.c))
    r = 0.0
    for idx in combinations(range(g.spectrum.t), n + 1):
        M = (A[:, idx[1:]] - A[:, [idx[0]]]).T
        rhs = logc[idx[0]] - logc[list(idx[1:])]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        r = max(r, float(np.linalg.norm(np.linalg.solve(M, rhs))))
    return r


def _join_pieces(pieces, tol):
    """Union-find over contour pieces whose endpoints coincide."""
    parent = list(range(len(pieces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ends = [(p[0], p[-1]) for p in pieces]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if min(np.linalg.norm(a - b) for a in ends[i] for b in ends[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(pieces)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


@dataclass
class ZeroSetSample:
    signature: TopologySignature
    box: float
    grid: int
    polylines: list = field(repr=False, default_factory=list)
    compact_flags: list = field(default_factory=list)
    end_pairs: tuple = ()


def _hull_edges(spec: Spectrum):
    """Boundary edges of Conv(A) as (equations, sorted member tuples)."""
    hull = ConvexHull(spec.A.T)
    eq = hull.equations
    vals = spec.A.T @ eq[:, :-1].T + eq[:, -1]
    span = max(1.0, float(np.abs(spec.A).max()))
    members = [tuple(int(i) for i in np.flatnonzero(np.abs(vals[:, k]) <= 1e-9 * span)) for k in range(len(eq))]
    return eq, members


def _escape_edge(spec: Spectrum, y, edges) -> tuple:
    eq, members = edges
    mu = moment_map(spec, np.asarray(y)[None])[0]
    return members[int(np.argmin(-(mu @ eq[:, :-1].T + eq[:, -1])))]


def _signature_2d(g: ExpSum, half: float, grid: int, delta: float, dist) -> ZeroSetSample:
    axis = np.linspace(-half, half, grid)
    Y1, Y2 = np.meshgrid(axis, axis, indexing="ij")
    vals = scaled_eval(g, np.stack([Y1, Y2], axis=-1))
    h = axis[1] - axis[0]
    pieces = [-half + h * p for p in find_contours(vals, 0.0)]
    groups = _join_pieces(pieces, 2 * h)
    flags, polys, pairs = [], [], []
    edges = _hull_edges(g.spectrum)
    for grp in groups:
        pts = np.vstack([pieces[i] for i in grp])
        on_edge = np.any(np.abs(pts) >= half - 1.5 * h)
        closed = len(grp) == 1 and np.linalg.norm(pieces[grp[0]][0] - pieces[grp[0]][-1]) <= 2 * h
        far = dist(moment_map(g.spectrum, pts)).min() >= delta
        flags.append(bool(closed and not on_edge and far))
        polys.extend(pieces[i] for i in grp)
        ends = [q for i in grp for q in (pieces[i][0], pieces[i][-1]) if np.abs(q).max() >= half - 1.5 * h]
        if ends:
            pairs.append(tuple(sorted(_escape_edge(g.spectrum, q, edges) for q in ends)))
    sig = TopologySignature(len(groups), int(sum(flags)))
    return ZeroSetSample(sig, half, grid, polys, flags, tuple(sorted(pairs)))


def _ends_escape(sample: ZeroSetSample, spec: Spectrum, delta, dist) -> bool:
    """Do all non-compact pieces reach the box where the moment map is within ``delta`` of the boundary?"""
    half = sample.box
    for poly in sample.polylines:
        for p in (poly[0], poly[-1]):
            if np.abs(p).max() >= 0.99 * half and dist(moment_map(spec, p[None]))[0] >= delta:
                return False
    return True


def topology_signature(g: ExpSum, grid: int = 1024, box: float | None = None, delta_rel: float = 5e-3,
                       check_resolution: bool = False, max_doublings: int = 6, return_sample: bool = False):
    """Component counts of the real zero set of ``g`` (``n`` in {1, 2}).

    With ``box=None`` the square ``[-R, R]^2`` starts at a few times the
    tropical radius and doubles until every piece that meets its edge is
    within ``delta`` of the polytope boundary under the moment map, and the
    signature agrees with the one on the next larger box (same spacing).

    Emits ResolutionWarning if ``check_resolution`` and the signature at
    ``2 * grid`` differs.
    """
    spec = g.spectrum
    if spec.n == 1:
        k = univariate_root_count(g).count
        sig = TopologySignature(k, k)
        return (sig, None) if return_sample else sig
    if spec.n != 2:
        raise UnsupportedDimension("zero-set topology is implemented for n = 1 and n = 2")
    dist = _boundary_distance(spec)
    delta = delta_rel * _diameter(spec)
    if box is not None:
        sample = _signature_2d(g, box, grid, delta, dist)
    else:
        half = max(6.0, 2.0 * tropical_radius(g) + 4.0)
        sample = _signature_2d(g, half, grid, delta, dist)
        for _ in range(max_doublings):
            bigger = _signature_2d(g, 2 * half, 2 * grid - 1, delta, dist)
            if bigger.signature == sample.signature and _ends_escape(sample, spec, delta, dist):
                break
            sample, half = bigger, 2 * half
            grid = 2 * grid - 1
        else:
            warnings.warn(f"box auto-expansion did not settle by R = {half}", ResolutionWarning, stacklevel=2)
    if check_resolution:
        fine = _signature_2d(g, sample.box, 2 * sample.grid, delta, dist)
        if fine.signature != sample.signature:
            warnings.warn(
                f"signature {sample.signature.as_tuple()} at grid {sample.grid} but "
                f"{fine.signature.as_tuple()} at grid {2 * sample.grid}",
                ResolutionWarning,
                stacklevel=2,
            )
    return (sample.signature, sample) if return_sample else sample.signature


def end_pattern(g: ExpSum, grid: int = 1024) -> tuple:
    """For each non-compact component, the polytope edges its two ends escape through.

    Components are traced on the auto-sized box; each end is assigned to the
    boundary edge of Conv(A) nearest to its moment-map image.  Ambiently
    isotopic zero sets give the same pattern, so this separates types that
    the component counts alone do not.
    """
    _, sample = topology_signature(g, grid=grid, return_sample=True)
    return sample.end_pairs if sample is not None else ()


@dataclass
class RootCount:
    count: int
    roots: np.ndarray
    descartes: int


def descartes_bound(c, a) -> int:
    order = np.argsort(np.asarray(a, dtype=float), kind="stable")
    s = np.sign(np.asarray(c, dtype=float)[order])
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def _univariate_terms(g: ExpSum):
    a = g.spectrum.A[0]
    order = np.argsort(a)
    return a[order], g.c[order]


def _scaled(a, c):
    def f(y):
        e = a * y + np.log(np.abs(c))
        return float(np.sum(np.sign(c) * np.exp(e - e.max())))
    return f


def _outer_bound(a, c) -> float:
    # beyond this |y| one extreme term outweighs all the others
    hi = np.log(np.abs(c[:-1]).sum() / abs(c[-1])) / (a[-1] - a[-2])
    lo = np.log(np.abs(c[1:]).sum() / abs(c[0])) / (a[1] - a[0])
    return max(0.0, hi, lo) + 1.0


def _roots_rolle(a, c, lo, hi, zero_tol):
    """Real roots of ``sum c_j e^{a_j y}`` on [lo, hi].

    Dividing by ``e^{a_0 y}`` and differentiating kills the first term, so
    the roots of the shorter sum separate those of this one.
    """
    if len(a) == 1:
        return []
    f = _scaled(a, c)
    crit = _roots_rolle(a[1:] - a[0], c[1:] * (a[1:] - a[0]), lo, hi, zero_tol)
    knots = [lo, *crit, hi]
    vals = [f(k) for k in knots]
    roots = []
    for x0, x1, f0, f1 in zip(knots[:-1], knots[1:], vals[:-1], vals[1:]):
        if f0 == 0:
            roots.append(x0)
        elif f1 != 0 and (f0 > 0) != (f1 > 0):
            roots.append(brentq(f, x0, x1, xtol=1e-14, rtol=1e-14))
    if vals[-1] == 0:
        roots.append(hi)
    for k, v in zip(crit, vals[1:-1]):
        if abs(v) <= zero_tol:
            roots.append(k)
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-10 * max(1.0, abs(r)):
            out.append(r)
    return out


def univariate_root_count(g: ExpSum, zero_tol: float = 1e-12) -> RootCount:
    """Real zeros of a one-variable exponential sum, with the Descartes bound."""
    if g.n != 1:
        raise UnsupportedDimension("univariate root count needs n = 1")
    a, c = _univariate_terms(g)
    bound = descartes_bound(c, a)
    if len(a) == 1:
        return RootCount(0, np.array([]), 0)
    R = _outer_bound(a, c)
    # shifting y by s multiplies c_j by e^{a_j s}, so the recursion runs on the original terms
    roots = np.array(_roots_rolle(a, c, -R, R, zero_tol))
    return RootCount(len(roots), roots, bound)


def k_root_coefficients(k: int, t: int = 5, exponents=None) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of a ``t``-term univariate sum with exactly ``k`` real zeros.

    The polynomial ``prod_{i<k}(x - r_i) * (x^2 + x + 1)^m (x + 2)^e`` has
    ``k`` positive roots and none elsewhere on the positive axis; with
    ``x = e^y`` it becomes an exponential sum with exponents ``0..t-1``.
    Zero coefficients are nudged so every term is present.
    """
    if not 0 <= k <= t - 1:
        raise ValueError(f"k must be in 0..{t - 1}")
    P = np.polynomial.polynomial
    poly = np.array([1.0])
    for i in range(k):
        poly = P.polymul(poly, [-(1.0 + 0.75 * i), 1.0])
    rest = t - 1 - k
    while rest >= 2:
        poly = P.polymul(poly, [1.0, 1.0, 1.0])
        rest -= 2
    if rest:
        poly = P.polymul(poly, [2.0, 1.0])
    poly = np.where(np.abs(poly) < 1e-9, 1e-3, poly)
    a = np.arange(t, dtype=float) if exponents is None else np.asarray(exponents, dtype=float)
    return a, poly


@dataclass
class ConstancyReport:
    sigma: tuple
    chamber_count: int
    signatures: dict
    samples: dict = field(repr=False)
    fiber_checks: int = 0
    end_patterns: dict = field(default_factory=dict)
    patterns_constant: bool = True

    @property
    def distinct(self) -> int:
        return len(set(self.signatures.values()))

    @property
    def refined_distinct(self) -> int:
        return len({(self.signatures[k], self.end_patterns.get(k)) for k in self.signatures})


def chamber_constancy_check(spec: Spectrum, basis, sigma, samples_per_chamber: int = 5, chambers=None,
                            grid: int = 1024, fiber_moves: int = 0, rng=0, window: float = 8.0) -> ConstancyReport:
    """Every sample of a chamber must give one zero-set signature.

    Samples ``v`` are lifted to ``c = sigma * exp(u)`` with ``u`` the
    minimum-norm solution of ``u B = v``.  ``fiber_moves`` extra samples per
    chamber add random combinations of rows of the lifted matrix to ``u``,
    which leaves ``v`` unchanged.

    Raises
    ------
    ConstancyViolation
        With the first disagreeing pair of (point, signature).
    """
    from .chambers import count_chambers
    from .completion import completed_signed_contour

    B = _as_B(basis)
    sigma = np.asarray(canonical_sign(sigma), dtype=float)
    rng = np.random.default_rng(rng)
    if chambers is None:
        chambers = count_chambers(completed_signed_contour(spec, B, sigma), window=window)
    lifted = build_lifted(spec)
    sigs, samples, patterns, fibers = {}, {}, {}, 0
    same_pattern = True

    def observe(v, c):
        sig, smp = topology_signature(ExpSum(spec, c), grid=grid, return_sample=True)
        return (tuple(np.round(v, 6)), sig), (smp.end_pairs if smp is not None else ())

    for ch in chambers.chambers:
        pts = chambers.sample(ch.id, samples_per_chamber, rng)
        recorded, pats = [], []
        for v in pts:
            c = lift_reduced(v, B, sigma)
            rec, pat = observe(v, c)
            recorded.append(rec)
            pats.append(pat)
            for _ in range(fiber_moves if len(recorded) == 1 else 0):
                shift = rng.normal(size=lifted.shape[0]) @ lifted
                rec, pat = observe(v, c * np.exp(shift))
                recorded.append(rec)
                pats.append(pat)
                fibers += 1
        first = recorded[0]
        for other in recorded[1:]:
            if other[1] != first[1]:
                raise ConstancyViolation(ch.id, first, other)
        same_pattern &= all(p == pats[0] for p in pats)
        sigs[ch.id] = first[1]
        samples[ch.id] = recorded
        patterns[ch.id] = pats[0]
    return ConstancyReport(tuple(int(s) for s in sigma), chambers.count, sigs, samples, fibers,
                           patterns, same_pattern)


def lift_consistency(v, basis, sigma) -> tuple[float, bool]:
    """(max |(Log|c|)B - v|, sign(c) == +-sigma) for the lift of ``v``."""
    B = _as_B(basis)
    c = lift_reduced(v, B, sigma)
    err = float(np.abs(np.log(np.abs(c)) @ B - np.asarray(v)).max())
    return err, canonical_sign(np.sign(c)) == canonical_sign(sigma)


__all__ = [
    "ConstancyReport",
    "ExpSum",
    "RootCount",
    "TopologySignature",
    "chamber_constancy_check",
    "descartes_bound",
    "eval_exp_sum",
    "k_root_coefficients",
    "lift_consistency",
    "moment_map",
    "scaled_eval",
    "topology_signature",
    "tropical_radius",
    "univariate_root_count",
]
