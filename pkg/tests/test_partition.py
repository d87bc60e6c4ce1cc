import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memtent.cones import cone_constants
from memtent.core import MapParams, distance_to_L, itinerary, itinerary_arrays, step, word
from memtent.errors import DegenerateInputError, RegimeError
from memtent.geometry import ConvexPolygon, DirectedSegment, clip_halfplane, contains_points
from memtent.partition import (
    cell_of_parameter, default_core_horizon, fiber_lengths, forward_image_polygons, gamma_from_cells, gamma_n,
    in_stable_core, in_stable_core_arrays, partition_polygons, refine_unstable_segment, xi_fiber,
)

P = MapParams(0.82)
CC = cone_constants(P)
SHORT = DirectedSegment.from_endpoints((0.5, 0.3), (0.5, 0.31))


def test_refine_n0_and_n1():
    (c,) = refine_unstable_segment(SHORT, 0, P)
    assert c.word == "" and c.expansion == 1.0 and c.length == pytest.approx(0.01)
    (c,) = refine_unstable_segment(SHORT, 1, P)
    assert c.word == "1"
    assert c.expansion == pytest.approx(math.sqrt(1 + 4 * 0.82 ** 2), rel=1e-12)
    assert c.expansion == pytest.approx(1.92083, abs=1e-5)


def test_refine_rejects_bad_input():
    with pytest.raises(DegenerateInputError):
        refine_unstable_segment(DirectedSegment((0.5, 0.5), (0.0, 1.0), 0.0, 1e-14), 3, P)
    with pytest.raises(ValueError):
        refine_unstable_segment(DirectedSegment.from_endpoints((0.1, 0.5), (0.9, 0.5)), 3, P)
    with pytest.raises(ValueError):
        refine_unstable_segment(SHORT, -1, P)


def test_gamma_small_n():
    # Gamma_n = sum |J| / |G^n J| is a sum of inverse expansions
    assert gamma_n(SHORT, 0, P) == 1.0
    assert gamma_n(SHORT, 1, P) == pytest.approx(1 / math.sqrt(1 + 4 * 0.82 ** 2), rel=1e-12)
    assert gamma_n(SHORT, 1, P) == pytest.approx(0.52061, abs=1e-5)


segments = st.builds(
    lambda x, y, u, L: DirectedSegment.from_endpoints((x, y), (x + u * L, y + L)),
    st.floats(0.05, 0.95), st.floats(0.0, 0.5), st.floats(-0.7, 0.7), st.floats(0.01, 0.5),
).filter(lambda I: 0 <= I.endpoints[1][0] <= 1)


@settings(max_examples=40, deadline=None)
@given(segments, st.integers(0, 10))
def test_refine_tiles_and_maps_exactly(I, n):
    cells = refine_unstable_segment(I, n, P)
    assert sum(c.length for c in cells) == pytest.approx(I.length, rel=1e-10)
    assert cells[0].sub_interval[0] == I.a and cells[-1].sub_interval[1] == I.b
    for a, b in zip(cells, cells[1:]):
        assert abs(a.sub_interval[1] - b.sub_interval[0]) <= 1e-12
    for c in cells:
        t = 0.5 * sum(c.sub_interval)
        p = tuple(np.clip(I.point(t), 0, 1))
        assert word(itinerary(p, n, P)) == c.word
        q = p
        for _ in range(n):
            q, _ = step(q, P)
        assert np.hypot(*(np.array(q) - c.image.point(0.5 * c.image.length))) <= 1e-10
        assert c.expansion >= CC.rate_constant ** -1 * CC.lambda_plus ** -n * (1 - 1e-12)


def test_cell_of_parameter():
    I = DirectedSegment.from_endpoints((0.2, 0.1), (0.2, 0.9))
    cells = refine_unstable_segment(I, 6, P)
    t = np.array([c.sub_interval[0] + 0.5 * c.length for c in cells])
    np.testing.assert_array_equal(cell_of_parameter(cells, t), np.arange(len(cells)))
    assert gamma_from_cells(cells) == pytest.approx(gamma_n(I, 6, P))


def test_forward_images():
    ps = forward_image_polygons(0, P)
    assert len(ps.polygons) == 1 and ps.total_area == 1.0
    ps = forward_image_polygons(1, P)
    assert len(ps.polygons) == 2 and all(len(p) == 4 for p in ps.polygons)
    assert ps.total_area == pytest.approx(0.36, rel=1e-12)
    ps = forward_image_polygons(10, P)
    assert ps.total_area == pytest.approx(0.36 ** 10, rel=1e-9)
    assert ps.total_area == pytest.approx(3.656e-5, rel=1e-3)


@pytest.mark.parametrize("a", [0.76, 0.9, 0.99])
def test_area_law_other_alphas(a):
    params = MapParams(a)
    assert forward_image_polygons(8, params).total_area == pytest.approx(params.jac ** 8, rel=1e-9)


def test_partition_small_n():
    cells = partition_polygons(1, P)
    assert sorted(c.word for c in cells) == ["1", "2"]
    assert sum(c.area for c in cells) == pytest.approx(1.0, abs=1e-12)
    cells = partition_polygons(2, P)
    assert len(cells) <= 4
    assert sum(c.area for c in cells) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        partition_polygons(0, P)


def test_partition_matches_itineraries():
    cells = partition_polygons(5, P)
    rng = np.random.default_rng(3)
    pts = rng.random((2000, 2))
    words = ["".join(map(str, w)) for w in itinerary_arrays(pts[:, 0], pts[:, 1], 5, P)]
    by_word = {c.word: c for c in cells}
    for p, w in zip(pts, words):
        assert by_word[w].contains(p, tol=1e-9)


def test_partition_maps_are_affine():
    for poly, M, c in partition_polygons(4, P, return_maps=True):
        p = poly.vertices.mean(axis=0)
        q = tuple(p)
        for _ in range(4):
            q, _ = step(q, P)
        np.testing.assert_allclose(M @ p + c, q, atol=1e-12)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1.5, 1.5))
def test_polygon_split_conserves_area(a, b, c):
    sq = ConvexPolygon.unit_square()
    if math.hypot(a, b) < 1e-3:
        return
    lo, hi = sq.split(a, b, c)
    assert lo.area + hi.area == pytest.approx(1.0, abs=1e-10)


def test_clip_and_contains():
    sq = ConvexPolygon.unit_square()
    half = clip_halfplane(sq, 1.0, 0.0, -0.5)
    assert half.area == pytest.approx(0.5)
    assert half.contains((0.25, 0.5)) and not half.contains((0.75, 0.5))
    m = contains_points(half, np.array([0.25, 0.75]), np.array([0.5, 0.5]))
    assert m.tolist() == [True, False]
    # clockwise input is reoriented
    cw = ConvexPolygon(np.array([[0, 0], [0, 1], [1, 1], [1, 0]]))
    assert cw.area == 1.0 and cw.contains((0.5, 0.5))


def test_fiber_at_fixed_point():
    f = xi_fiber((2 / 3, 2 / 3), 48, P)
    assert f.slope == pytest.approx(-CC.theta0, abs=1e-12)
    assert f.D > 0 and f.d_minus > 0 and f.d_plus > 0
    assert not f.accuracy_warning
    assert xi_fiber((0.3, 0.4), 4, P).accuracy_warning
    with pytest.raises(RegimeError):
        xi_fiber((0.3, 0.4), 8, MapParams(0.6, strict=False))


def test_fiber_endpoints_on_cut_lines():
    # most fibers run across the whole square (L is itself nearly a stable direction),
    # so check every end that was produced by a cut
    rng = np.random.default_rng(7)
    checked = 0
    for p in rng.random((2000, 2)):
        f = xi_fiber(p, 30, P)
        for end, k in ((f.segment.point(f.segment.a), f.trim_minus), (f.segment.point(f.segment.b), f.trim_plus)):
            if k < 0:
                continue
            q = tuple(np.clip(end, 0, 1))
            for _ in range(k):
                q, _ = step(q, P)
            assert distance_to_L(q, P) <= 1e-10
            checked += 1
    assert checked > 20


def test_fiber_points_share_itinerary():
    rng = np.random.default_rng(11)
    for p in rng.random((50, 2)):
        f = xi_fiber(p, 20, P)
        s = np.linspace(f.segment.a, f.segment.b, 41)[1:-1]
        pts = f.segment.point(s)
        ok = (pts >= 0).all(axis=1) & (pts <= 1).all(axis=1)
        w = itinerary_arrays(pts[ok, 0], pts[ok, 1], 20, P)
        target = itinerary_arrays(np.array([p[0]]), np.array([p[1]]), 20, P)[0]
        assert (w == target).all()


def test_fiber_lengths_vectorized():
    pts = np.array([[0.3, 0.4], [0.9, 0.1]])
    D = fiber_lengths(pts[:, 0], pts[:, 1], 30, P)
    assert D.tolist() == [xi_fiber(p, 30, P).D for p in pts]


def test_stable_core_examples():
    assert in_stable_core((2 / 3, 2 / 3), 0.1, None, P)
    assert not in_stable_core((0.5, 0.5), 1e-6, None, P)
    assert default_core_horizon(0.01, P) >= 1
    with pytest.raises(ValueError):
        in_stable_core((0.3, 0.3), 0.0, None, P)


def test_stable_core_monotone_in_delta():
    rng = np.random.default_rng(5)
    pts = rng.random((2000, 2))
    a = in_stable_core_arrays(pts[:, 0], pts[:, 1], 0.05, params=P)
    b = in_stable_core_arrays(pts[:, 0], pts[:, 1], 0.01, params=P)
    assert not (a & ~b).any()
