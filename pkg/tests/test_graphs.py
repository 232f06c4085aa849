"""Tests for geometric-graph analytics: avoiding pairs, KLV, charging, perturbation."""
import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.census import centers_graph, digon_census
from src.errors import FalsificationError, InvalidInputError
from src.generators import gen_touching_quad
from src.geometry import Circle, Point, collinear_triple_exists, orientation, validate_family
from src.graphs import (
    BLUE, RED, Edge, GeoGraph, Segment, convex_position_avoiding, find_avoiding_pairs,
    is_avoiding, is_bipartite, is_plane_embedding, klv_check, klv_pipeline,
    lens_edge_collinearities, perturb_general_position, quadrilateral_order,
    resolve_avoiding_pairs, segments_conflict, verify_main_theorem,
)
from src.settings import settings


def seg(ax, ay, bx, by):
    return Segment(Point(ax, ay), Point(bx, by))


def graph(points, edges, color=None):
    return GeoGraph(tuple(Point(x, y) for x, y in points), tuple(Edge(i, j, color) for i, j in edges))


SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


@pytest.mark.parametrize("e, f, expected", [
    (seg(0, 0, 1, 0), seg(0, 1, 1, 1), True),
    (seg(0, 0, 1, 1), seg(1, 0, 0, 1), False),
    (seg(0, 0, 1, 0), seg(1, 0, 1, 1), False),
    (seg(0, 0, 1, 0), seg(2, 0, 3, 0), False),
    (seg(0, 0, 4, 0), seg(1, 1, 2, 3), False),
    (seg(0, 0, 4, 0), seg(1, 1, 3, 1), True),
])
def test_is_avoiding_examples(e, f, expected):
    assert is_avoiding(e, f) is expected
    assert is_avoiding(f, e) is expected
    assert convex_position_avoiding(e, f) is expected


points = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@hsettings(max_examples=400, deadline=None)
@given(st.lists(points, min_size=4, max_size=4, unique=True))
def test_is_avoiding_matches_convex_position(coords):
    """Mutual same-side test against the hull definition, degenerate inputs included."""
    a, b, c, d = (Point(x, y) for x, y in coords)
    e, f = Segment(a, b), Segment(c, d)
    assert is_avoiding(e, f) == convex_position_avoiding(e, f)
    assert is_avoiding(e, f) == is_avoiding(f, e)


def test_edge_is_normalized():
    e = Edge(3, 1, RED)
    assert e.key == (1, 3)
    assert e == Edge(1, 3, BLUE)
    with pytest.raises(InvalidInputError):
        Edge(2, 2)


def test_geograph_rejects_bad_edges():
    with pytest.raises(InvalidInputError):
        graph(SQUARE, [(0, 4)])
    with pytest.raises(InvalidInputError):
        graph(SQUARE, [(0, 1), (1, 0)])


def test_find_avoiding_pairs_on_square():
    g = graph(SQUARE, [(0, 1), (1, 2), (2, 3), (0, 3)])
    pairs = [(e.key, f.key) for e, f in find_avoiding_pairs(g)]
    assert pairs == [((0, 1), (2, 3)), ((0, 3), (1, 2))]
    assert find_avoiding_pairs(g, threads=4) == find_avoiding_pairs(g, threads=1)


def test_klv_check_verdicts():
    star = graph([(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert klv_check(star).status == "pass"
    square = graph(SQUARE, [(0, 1), (1, 2), (2, 3), (0, 3)])
    verdict = klv_check(square)
    assert verdict.status == "not_applicable"
    assert verdict.avoiding_pairs == 2


def test_klv_bound_is_tight_on_triangle_with_inner_point():
    """K4 on a triangle plus an interior point: no avoiding pair, 6 = 2*4 - 2 edges."""
    k4 = graph([(0, 0), (4, 0), (0, 4), (1, 1)], [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    verdict = klv_check(k4)
    assert verdict.status == "pass"
    assert verdict.edge_count == verdict.bound == 6


def test_quadrilateral_order_on_touching_quad(touching_quad):
    g = centers_graph(touching_quad, digon_census(touching_quad))
    (e1, f1), (e2, f2) = find_avoiding_pairs(g)
    q1 = quadrilateral_order(g, e1, f1)
    assert (q1.a1, q1.a2, q1.a3, q1.a4) == (0, 1, 2, 3)
    assert q1.charged_diagonal == (0, 2)
    q2 = quadrilateral_order(g, e2, f2)
    assert (q2.a1, q2.a2, q2.a3, q2.a4) == (3, 0, 1, 2)
    assert q2.charged_diagonal == (1, 3)


def test_main_theorem_on_touching_quad(touching_quad):
    g = centers_graph(touching_quad, digon_census(touching_quad))
    report = verify_main_theorem(touching_quad, g)
    assert report.avoiding_count == 2
    for pair in report.pairs:
        assert pair.meeting_point == (0.0, 0.0)


@pytest.fixture
def crossing_square():
    """Four radius-2 circles on a square: pairwise crossing, no tangencies."""
    return validate_family([Circle.from_radius(x, y, 2) for x, y in [(0, 0), (2, 0), (2, 2), (0, 2)]])


def test_main_theorem_rejects_fake_lens_pair(crossing_square):
    g = GeoGraph(tuple(crossing_square.centers), (Edge(0, 1, RED), Edge(2, 3, RED)))
    with pytest.raises(FalsificationError) as exc:
        verify_main_theorem(crossing_square, g)
    assert exc.value.theorem == "main"
    assert exc.value.witness["e"] == [0, 1]


def test_main_theorem_rejects_uncolored_pair(crossing_square):
    g = GeoGraph(tuple(crossing_square.centers), (Edge(0, 1), Edge(2, 3)))
    with pytest.raises(FalsificationError):
        verify_main_theorem(crossing_square, g)


def test_main_theorem_checks_vertices(crossing_square):
    g = graph([(9, 9), (2, 0), (2, 2), (0, 2)], [])
    with pytest.raises(InvalidInputError):
        verify_main_theorem(crossing_square, g)


def test_resolution_on_touching_quad(touching_quad):
    """Each avoiding pair loses its larger edge and is charged to a distinct blue diagonal."""
    g = centers_graph(touching_quad, digon_census(touching_quad))
    resolution = resolve_avoiding_pairs(g)
    assert [c.removed.key for c in resolution.charges] == [(2, 3), (1, 2)]
    assert [c.blue_edge for c in resolution.charges] == [(0, 2), (1, 3)]
    assert resolution.double_charged == ()
    assert resolution.graph.edge_count == 4
    assert find_avoiding_pairs(resolution.graph) == []


def test_resolution_requires_blue_diagonal(crossing_square):
    g = GeoGraph(tuple(crossing_square.centers), (Edge(0, 1, RED), Edge(2, 3, RED)))
    with pytest.raises(FalsificationError):
        resolve_avoiding_pairs(g)


def test_bipartite_and_plane():
    square = graph(SQUARE, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert is_bipartite(square) and is_plane_embedding(square)
    triangle = graph([(0, 0), (1, 0), (0, 1)], [(0, 1), (1, 2), (0, 2)])
    assert not is_bipartite(triangle)
    diagonals = graph(SQUARE, [(0, 2), (1, 3)])
    assert not is_plane_embedding(diagonals)


def test_segments_conflict_cases():
    assert segments_conflict(seg(0, 0, 2, 0), seg(0, 0, 1, 0))
    assert not segments_conflict(seg(0, 0, 2, 0), seg(0, 0, -1, 0))
    assert not segments_conflict(seg(0, 0, 2, 0), seg(0, 0, 1, 1))
    assert segments_conflict(seg(0, 0, 2, 0), seg(1, 0, 1, 1))
    assert not segments_conflict(seg(0, 0, 1, 0), seg(2, 0, 3, 0))


def test_lens_edge_collinearities():
    g = graph([(0, 0), (2, 0), (1, 0), (5, 5), (5, 0)], [(0, 1)])
    assert [(e.key, k) for e, k in lens_edge_collinearities(g)] == [((0, 1), 2), ((0, 1), 4)]


def test_perturbation_moves_points_slightly():
    points = [Point(0, 0), Point(1, 0), Point(2, 0), Point(0, 1)]
    moved = perturb_general_position(points, seed=7)
    assert not collinear_triple_exists(moved)[0]
    bound = Fraction(1, 1 << (settings.PERTURB_SHIFT_EXPONENT + 1))
    for p, q in zip(points, moved):
        assert abs(q.x - p.x) < bound and abs(q.y - p.y) < bound
    assert perturb_general_position(points, seed=7) == moved


NEAR_COLLINEAR = [
    (0, 0), (20, Fraction(3) + Fraction(1, 10 ** 9)), (0, 1), (10, 2), (0, -5), (0, -10),
]


@pytest.mark.parametrize("seed", range(20))
def test_perturbation_keeps_nonzero_orientations(seed):
    points = [Point(x, y) for x, y in NEAR_COLLINEAR]
    moved = perturb_general_position(points, seed=seed)
    assert not collinear_triple_exists(moved)[0]
    for a, b, c in itertools.combinations(range(len(points)), 3):
        before = orientation(points[a], points[b], points[c])
        if before:
            assert orientation(moved[a], moved[b], moved[c]) == before


@pytest.mark.parametrize("seed", range(20))
def test_pipeline_near_collinear_centers(seed):
    f = validate_family(
        Circle.from_radius(x, y, 100 + Fraction(k, 1000)) for k, (x, y) in enumerate(NEAR_COLLINEAR)
    )
    g = GeoGraph(tuple(f.centers), (Edge(0, 1, RED), Edge(2, 3, RED)))
    assert find_avoiding_pairs(g) == []
    report = klv_pipeline(f, g, seed=seed)
    assert report.perturbed
    assert report.collinearities == ()
    assert report.red_edges == 2


def test_perturbation_edge_cases():
    general = [Point(0, 0), Point(1, 0), Point(0, 1)]
    assert perturb_general_position(general) == general
    with pytest.raises(InvalidInputError):
        perturb_general_position([Point(0, 0), Point(0, 0), Point(1, 0)])


def test_pipeline_on_touching_quad(touching_quad):
    g = centers_graph(touching_quad, digon_census(touching_quad))
    report = klv_pipeline(touching_quad, g)
    assert report.ok
    assert report.red_edges == 4
    assert report.klv.status == "pass"
    assert report.collinearities == ()
    assert not report.perturbed


def test_pipeline_on_random_corpus(random_corpus):
    """Tangency-free families have no avoiding pairs and stay within 2n - 2 lens edges."""
    for f in random_corpus:
        g = centers_graph(f, digon_census(f))
        assert find_avoiding_pairs(g) == []
        report = klv_pipeline(f, g)
        assert report.ok
        assert report.red_edges <= 2 * f.n - 2


@pytest.mark.slow
@hsettings(max_examples=10_000, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=4, max_size=4, unique=True))
def test_is_avoiding_matches_convex_position_large(coords):
    a, b, c, d = (Point(x, y) for x, y in coords)
    e, f = Segment(a, b), Segment(c, d)
    assert is_avoiding(e, f) == convex_position_avoiding(e, f)


quad_parameters = st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=20)


@hsettings(max_examples=40, deadline=None)
@given(quad_parameters, quad_parameters, quad_parameters, quad_parameters)
def test_touching_quad_draws_have_two_certified_pairs(a, b, c, d):
    f = gen_touching_quad(a, b, c, d)
    g = centers_graph(f, digon_census(f))
    report = verify_main_theorem(f, g)
    assert report.avoiding_count == 2
    assert all(pair.meeting_point == (0.0, 0.0) for pair in report.pairs)
    assert {pair.quad.charged_diagonal for pair in report.pairs} == {(0, 2), (1, 3)}
    resolution = resolve_avoiding_pairs(g)
    assert resolution.double_charged == ()
    assert len({charge.blue_edge for charge in resolution.charges}) == 2
    assert find_avoiding_pairs(resolution.graph) == []
    assert klv_pipeline(f, g).red_edges == 4
