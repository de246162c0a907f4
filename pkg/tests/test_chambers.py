import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xicontour.arrangement import (
    box_segments,
    clip_polyline,
    euler_count,
    line_segment,
    planar_graph,
    segment_intersections,
)
from xicontour.chambers import (
    arrangement_counts,
    chamber_bound,
    count_chambers,
    hypothesis_check,
    incremental_line_check,
    isotopy_bound,
    korben_bound,
    snap_asymptotes,
    steiner_regions,
)
from xicontour.completion import completed_signed_contour
from xicontour.exceptions import WindowTooSmall
from xicontour.parametrization import parse_sign


def circle(cx, cy, r, k=400):
    t = np.linspace(0, 2 * math.pi, k)
    return np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])


def tangent_line(phi, r=1.0):
    return (r * np.array([math.cos(phi), math.sin(phi)]), np.array([-math.sin(phi), math.cos(phi)]))


def contour(arcs=(), lines=()):
    return SimpleNamespace(arcs=list(arcs), lines=list(lines))


def test_bound_formulas():
    assert isotopy_bound(2) == 11
    assert chamber_bound(2) == 2
    assert steiner_regions(3) == 7
    assert korben_bound(2) == {"intersections": 0, "components": 2}
    with pytest.raises(ValueError):
        steiner_regions(-1)


def test_no_curves_is_one_chamber():
    ch = count_chambers(contour(), resolution=256)
    assert (ch.count, ch.inner, ch.raster_count) == (1, 0, 1)


def test_single_circle():
    ch = count_chambers(contour([circle(0, 0, 2)]), resolution=512)
    assert (ch.count, ch.inner) == (2, 1) and ch.agree
    inside = [c for c in ch.chambers if c.bounded][0]
    assert ch.locate([0.1, 0.0]) == inside.id
    assert ch.locate([5.0, 5.0]) != inside.id
    assert inside.area == pytest.approx(math.pi * 4, rel=0.02)


def test_two_overlapping_circles():
    ch = count_chambers(contour([circle(-1, 0, 2), circle(1, 0, 2)]), resolution=512)
    assert (ch.count, ch.inner) == (4, 3) and ch.agree


def test_samples_stay_in_their_chamber():
    ch = count_chambers(contour([circle(-1, 0, 2), circle(1, 0, 2)]), resolution=512)
    for c in ch.chambers:
        for v in ch.sample(c.id, 5, rng=1):
            assert ch.locate(v) == c.id


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0.0, 0.8 * math.pi), min_size=1, max_size=5, unique=True))
def test_lines_in_general_position(phis):
    # tangents of a radius-2 circle at angles within 0.8 pi meet pairwise inside radius 6.5;
    # angles at least 0.5 apart keep every triangle well above pixel size
    phis = sorted(phis)
    if min(np.diff(phis), default=1.0) < 0.5:
        return
    lines = [tangent_line(p, 2.0) for p in phis]
    ch = count_chambers(contour(lines=lines))
    m = len(lines)
    assert ch.count == steiner_regions(m)
    assert ch.agree
    assert ch.inner == (m - 1) * (m - 2) // 2


def test_window_too_small():
    # a circle beyond the window appears when it is doubled
    with pytest.raises(WindowTooSmall):
        count_chambers(contour([circle(11, 0, 1.5)]), window=8, resolution=256)


def test_segment_intersections_exact():
    a = np.array([[[0.0, 0.0], [2.0, 2.0]]])
    b = np.array([[[0.0, 2.0], [2.0, 0.0]], [[3.0, 0.0], [3.0, 1.0]], [[0.0, 1.0], [2.0, 3.0]]])
    hits = segment_intersections(a, b)
    assert [(i, j) for i, j, _ in hits] == [(0, 0)]
    assert np.allclose(hits[0][2], [1.0, 1.0])


def test_euler_on_box():
    box = box_segments(1.0)
    verts, edges = planar_graph(box, 1e-9, segment_intersections(box))
    e = euler_count(verts, edges)
    assert e.bounded_faces == 1


def test_clip_polyline():
    segs = clip_polyline(np.array([[-5.0, 0.0], [0.0, 0.0], [5.0, 0.0]]), 1.0)
    assert np.allclose(segs.reshape(-1, 2)[[0, -1]], [[-1.0, 0.0], [1.0, 0.0]])
    assert line_segment(np.array([0.0, 5.0]), np.array([1.0, 0.0]), 1.0) is None


def test_asymptote_snapping():
    # y = exp(-x) runs into the line y = 0 below float resolution
    x = np.linspace(-4.0, 60.0, 4000)
    arc = np.column_stack([x, np.exp(-x)])
    line = (np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    snapped = snap_asymptotes([arc], [line], 8e-6)[0]
    assert snapped[-1, 1] < 0 < snapped[-2, 1]
    ch = count_chambers(contour([arc], [line]), window=8, resolution=1024)
    assert ch.count == 3 and ch.agree
    assert ch.doubled == (3, ch.inner)


def test_hypothesis_check_flags_double_crossing():
    rep = hypothesis_check([circle(-1, 0, 2), circle(1, 0, 2)])
    assert rep.pair_counts[(0, 1)] == 2 and not rep.ok
    rep = hypothesis_check([np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([[0.0, -1.0], [0.0, 1.0]])])
    assert rep.pair_counts[(0, 1)] == 1 and rep.ok


def test_incremental_lines_inf(inf_example):
    spec, B = inf_example
    cc = completed_signed_contour(spec, B, parse_sign("+--++"))
    steps = incremental_line_check(cc)
    assert len(steps) == 2 and all(s.ok for s in steps)


def test_pentagon_inner_chamber(pentagon):
    spec, B = pentagon
    ch = count_chambers(completed_signed_contour(spec, B, parse_sign("+--++")))
    assert (ch.count, ch.inner) == (3, 1)
    assert (ch.raster_count, ch.raster_inner) == (3, 1)
    assert all(c.clearance > 1e-3 * 8 for c in ch.chambers)


def test_arrangement_counts_curves_only():
    total, inner = arrangement_counts([circle(0, 0, 1)], [], 4.0)
    assert total.bounded_faces == 2 and inner == 1
