import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xicontour.contour import (
    Sampling,
    attained_sign_classes,
    breakpoint_groups,
    breakpoints,
    component_bound,
    cusp_polynomials,
    cusp_roots_crosscheck,
    find_cusps,
    leading_drop,
    r_polynomial_degree_check,
    trace_signed_contour,
    verify_gauss_normal,
)
from xicontour.exceptions import SpectrumError
from xicontour.parametrization import canonical_sign, parse_sign, sign_string, xi
from xicontour.roots import companion_real_roots, horner, real_roots
from xicontour.spectrum import Spectrum, basis_for

random_B = st.integers(0, 2**32 - 1).map(lambda seed: _random_basis(seed))


def _random_basis(seed, n=2):
    rng = np.random.default_rng(seed)
    while True:
        try:
            B = basis_for(Spectrum(rng.normal(size=(n, n + 3)))).B
        except SpectrumError:
            continue
        return B


def test_pentagon_breakpoints(pentagon):
    _, B = pentagon
    bps = breakpoints(B)
    assert len(bps) == 5 and len(breakpoint_groups(B)) == 5
    # oracle: the direction orthogonal to each row
    for bp in bps:
        lam = np.array([math.cos(bp.theta), math.sin(bp.theta)])
        assert abs(lam @ B[bp.index]) < 1e-12


def test_pentagon_attained(pentagon):
    _, B = pentagon
    got = sorted(sign_string(s) for s in attained_sign_classes(B))
    assert got == sorted(["++--+", "+---+", "+--++", "+--+-", "+-++-"])


def test_inf_breakpoints_collapse(inf_example):
    # two non-simplicial facets: only n + 1 = 3 distinct breakpoint directions
    assert len(breakpoint_groups(inf_example[1])) == 3


def test_arcs_lie_on_contour(pentagon):
    _, B = pentagon
    sigma = parse_sign("+--++")
    arcs = trace_signed_contour(B, sigma, Sampling(clip_window=8.0))
    assert arcs
    for arc in arcs:
        # the ends run out to within ~1e-17 of a breakpoint, where a unit
        # lambda is too coarse; compare where evaluating from lambda is well conditioned
        for lam, pt in zip(arc.lam, arc.points):
            if np.abs(B @ lam).min() < 1e-6:
                continue
            assert np.allclose(xi(lam, B), pt, atol=1e-9)
            assert canonical_sign(B @ lam) == sigma


def test_empty_class_has_no_arcs(pentagon):
    assert trace_signed_contour(pentagon[1], parse_sign("+++++")) == []


def test_pentagon_gauss(pentagon):
    _, B = pentagon
    worst, used = verify_gauss_normal(B, np.linspace(0, math.pi, 1000, endpoint=False))
    assert used > 900 and worst < 1e-5


@settings(max_examples=25, deadline=None)
@given(random_B)
def test_gauss_normal_random(B):
    worst, used = verify_gauss_normal(B, np.linspace(0.001, math.pi, 300, endpoint=False))
    assert used > 0 and worst < 1e-5


@settings(max_examples=60, deadline=None)
@given(random_B, st.floats(-5, 5))
def test_derivatives_are_euler_related(B, s):
    # xi is homogeneous of degree 0 in lambda, so lambda . dxi/ds = 0: p_1 = -s p_2
    p1, p2 = cusp_polynomials(B)
    scale = np.abs(p1).max() * max(1.0, abs(s)) ** len(p1)
    assert abs(horner(p1, s) + s * horner(p2, s)) <= 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(random_B)
def test_p2_drops_two_degrees(B):
    _, p2 = cusp_polynomials(B)
    assert max(leading_drop(p2)) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_cusps_at_most_n(seed, n):
    B = _random_basis(seed, n)
    cusps = find_cusps(B)
    assert len(cusps) <= n
    assert len(cusp_roots_crosscheck(B)) == len(cusps)


def test_pentagon_cusps_are_stationary(pentagon):
    _, B = pentagon
    cusps = find_cusps(B)
    assert len(cusps) == 2
    h = 1e-6
    for th in cusps.thetas:
        d = [xi([math.cos(th + e), math.sin(th + e)], B) for e in (h, -h)]
        speed = np.linalg.norm(d[0] - d[1]) / (2 * h)
        # compare with a generic point a short way off the cusp
        d2 = [xi([math.cos(th + 0.05 + e), math.sin(th + 0.05 + e)], B) for e in (h, -h)]
        assert speed < 1e-4 * np.linalg.norm(d2[0] - d2[1]) / (2 * h) + 1e-6


def test_leading_drop():
    assert leading_drop([1.0, 2.0, 0.0, 0.0]) == (0.0, 0.0)
    assert leading_drop([1.0, 0.0, 4.0]) == (1.0, 0.0)


def test_component_bound_formula():
    # k = t - d - 1, degree k (t - 1), bound deg (2 deg - 1)^(2t - d - 2)
    assert component_bound(5, 2) == 8 * 15**6
    assert component_bound(4, 2) == 3 * 5**4


def test_r_polynomial(pentagon):
    rep = r_polynomial_degree_check(pentagon[1], d=2)
    assert rep.degree_bound == 8
    assert rep.identically_zero
    assert rep.minor_degree <= rep.minor_bound


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-20, 20), min_size=1, max_size=6, unique=True))
def test_real_roots_match_oracle(roots):
    roots = sorted(roots)
    if min(np.diff(roots), default=1.0) < 1e-2:
        return
    coeffs = np.polynomial.polynomial.polyfromroots(roots)
    got = real_roots(coeffs)
    assert len(got) == len(roots)
    assert np.allclose(got, roots, atol=1e-6 * max(1.0, max(map(abs, roots))))
    assert len(companion_real_roots(coeffs)) == len(roots)


def test_real_roots_none():
    assert len(real_roots([1.0, 0.0, 1.0])) == 0
    assert np.allclose(real_roots([-2.0, 0.0, 1.0]), [-math.sqrt(2), math.sqrt(2)])


@pytest.mark.parametrize("sigma", ["++--+", "+-++-"])
def test_arcs_split_at_cusps(pentagon, sigma):
    _, B = pentagon
    cusps = find_cusps(B)
    for arc in trace_signed_contour(B, parse_sign(sigma), cusps=cusps):
        inside = [c for c in cusps.thetas if arc.theta_range[0] + 1e-9 < c < arc.theta_range[1] - 1e-9]
        assert not inside
