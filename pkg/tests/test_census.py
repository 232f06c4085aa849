"""Tests for the exact digon census and bound verdicts."""
import json
from fractions import Fraction

import numpy as np
import pytest

from src.census import (
    DigonCensus, RegionKind, centers_graph, check_bounds, digon_census, is_lens, is_lune,
    lune_graph, outer_supports_no_lens, region_blocked, restrict_census,
)
from src.errors import FalsificationError, FamilyValidationError, InvalidInputError
from src.generators import GenConfig, gen_random, gen_tight
from src.geometry import (
    Circle, Point, internally_tangent_outers, invert_family, reduce_internal_tangencies,
    surviving_indices, validate_family,
)
from src.graphs import BLUE, RED, is_bipartite, is_plane_embedding, klv_pipeline
from tests.conftest import FIXTURES


def test_two_circles(two_circles):
    """One lens and two crescent lunes; the lune bound is vacuous."""
    census = digon_census(two_circles)
    assert census.lens_pairs == {(0, 1)}
    assert census.lune_pairs == {(0, 1), (1, 0)}
    assert census.tangent_pairs == ()
    assert (census.lens_count, census.lune_count, census.lune_edge_count) == (1, 2, 1)
    bounds = check_bounds(census)
    assert bounds.lens_ok and bounds.lens_max == 2
    assert bounds.lune_vacuous and bounds.lune_max is None
    assert is_lune(two_circles, 0, 1) and is_lune(two_circles, 1, 0)


def test_pencil_only_extreme_pair_is_a_lens(pencil3):
    census = digon_census(pencil3)
    assert census.lens_pairs == {(0, 2)}
    assert not is_lens(pencil3, 0, 1)
    assert not is_lens(pencil3, 1, 2)


def test_pencil_lunes_on_both_sides(pencil3):
    """Crescents of neighbouring pencil circles on both sides: four faces, two pairs."""
    census = digon_census(pencil3)
    assert census.lune_pairs == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert census.lune_edge_count == 2
    assert check_bounds(census).lune_ok


def test_region_blocked_through_both_vertices(pencil3):
    """C_1 passes through both vertices of the extreme pair but stays outside its lens."""
    assert not region_blocked(pencil3, 1, 0, 2)
    assert region_blocked(pencil3, 2, 0, 1)
    assert region_blocked(pencil3, 1, 0, 2, RegionKind.LUNE)


def test_region_blocked_preconditions(pencil3, touching_quad):
    with pytest.raises(InvalidInputError):
        region_blocked(pencil3, 0, 0, 2)
    with pytest.raises(InvalidInputError):
        region_blocked(touching_quad, 1, 0, 2)


def test_touching_quad_census(touching_quad):
    expected = json.loads((FIXTURES / "census_touching_quad.json").read_text())
    census = digon_census(touching_quad)
    assert sorted(census.lens_pairs) == [tuple(p) for p in expected["lens_pairs"]]
    assert sorted(census.tangent_pair_set) == [tuple(p) for p in expected["tangent_pairs"]]
    for _, _, point in census.tangent_pairs:
        assert point.x == 0 and point.y == 0
    assert check_bounds(census).ok


@pytest.fixture
def unit_row():
    """Unit circles at x = 0, 1, 2: the outer two touch at (1, 0) on both lens boundaries."""
    return validate_family([Circle.from_radius(x, 0, 1) for x in (0, 1, 2)])


def test_tangency_on_lens_edge_is_strict_by_default(unit_row):
    census = digon_census(unit_row)
    assert census.lens_pairs == frozenset()
    assert census.tangent_pair_set == {(0, 2)}


def test_lenient_tangency_keeps_lenses(unit_row):
    census = digon_census(unit_row, lenient=True)
    assert census.lens_pairs == {(0, 1), (1, 2)}


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_tight_family_reaches_lens_bound(n):
    census = digon_census(gen_tight(n))
    assert census.lens_count == 2 * n - 2
    large_pairs = {(big, k) for big in (0, 1) for k in range(2, n)}
    assert census.lens_pairs == {(0, 1), (2, n - 1)} | large_pairs
    assert check_bounds(census).ok


@pytest.mark.slow
@pytest.mark.parametrize("n", [12, 16, 20])
def test_tight_family_reaches_lens_bound_large(n):
    census = digon_census(gen_tight(n))
    assert census.lens_count == 2 * n - 2
    assert (0, 1) in census.lens_pairs
    assert (2, n - 1) in census.lens_pairs


def test_random_corpus_bounds(random_corpus):
    """Lens and lune bounds, and the lune graph structure, on tangency-free families."""
    for f in random_corpus:
        census = digon_census(f)
        bounds = check_bounds(census)
        assert bounds.ok, f"bound failure on n={f.n}"
        assert census.lune_count == census.lune_edge_count
        lunes = lune_graph(f, census)
        assert is_bipartite(lunes)
        assert is_plane_embedding(lunes)


def test_threads_do_not_change_the_result(random_corpus):
    f = random_corpus[-1]
    assert digon_census(f, threads=4).same_digons(digon_census(f, threads=1))


def test_removing_circles_keeps_digons(random_corpus):
    """Digons of the full family survive in every subfamily containing both circles."""
    for f in random_corpus:
        if f.n < 4:
            continue
        full = digon_census(f)
        kept = list(range(1, f.n))
        sub = restrict_census(f, kept)
        assert {p for p in full.lens_pairs if 0 not in p} <= sub.lens_pairs
        assert {p for p in full.lune_pairs if 0 not in p} <= sub.lune_pairs


def test_restrict_census_reports_original_indices(pencil3):
    sub = restrict_census(pencil3, [0, 2])
    assert sub.lens_pairs == {(0, 2)}
    assert sub.lune_pairs == {(0, 2), (2, 0)}


def test_outer_circle_of_internal_tangency_has_no_lens():
    f = validate_family([
        Circle.from_radius(0, 0, 2), Circle.from_radius(1, 0, 1), Circle.from_radius(0, 1, 2),
    ])
    assert outer_supports_no_lens(f, 0)


def test_inversion_preserves_counts(tight5, random_corpus):
    """Inversion centered in the unbounded face maps lenses to lenses and lunes to lunes."""
    cases = [(tight5, Point(0, 20000))] + [(f, Point(1000, 1000)) for f in random_corpus[:6]]
    for f, center in cases:
        result = invert_family(f, center, Fraction(1))
        assert result.invariance_contract
        before, after = digon_census(f), digon_census(result.family)
        assert before.lens_count == after.lens_count
        assert before.lune_count == after.lune_count


def test_centers_graph_colors(touching_quad):
    graph = centers_graph(touching_quad, digon_census(touching_quad))
    assert [e.key for e in graph.red_edges] == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert [e.key for e in graph.blue_edges] == [(0, 2), (1, 3)]
    assert all(e.color == RED for e in graph.red_edges)
    assert all(e.color == BLUE for e in graph.blue_edges)


def test_bound_failure_raises_with_witness():
    census = DigonCensus(3, frozenset({(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)}), frozenset())
    bounds = check_bounds(census)
    assert not bounds.lens_ok
    with pytest.raises(FalsificationError) as exc:
        bounds.raise_on_failure()
    assert exc.value.theorem == "lenses"
    assert exc.value.witness["lens_pairs"][0] == (0, 1)
    assert exc.value.exit_code == 3


# n = 3..15; every third family without tangencies, the others with one or two injected
TANGENCY_CORPUS = [(3 + k % 13, k, k % 3) for k in range(200)]


@pytest.mark.slow
@pytest.mark.parametrize("n, seed, tangents", TANGENCY_CORPUS)
def test_bounds_on_tangency_corpus(n, seed, tangents):
    f = gen_random(GenConfig(n=n, seed=seed, tangent_pairs=tangents))
    census = digon_census(f)
    bounds = check_bounds(census)
    assert bounds.lens_ok, f"{census.lens_count} lenses on n={n}"
    assert bounds.lune_ok, f"{census.lune_edge_count} lune pairs on n={n}"
    lunes = lune_graph(f, census)
    assert is_bipartite(lunes)
    assert is_plane_embedding(lunes)
    report = klv_pipeline(f, centers_graph(f, census), seed=seed)
    assert report.ok
    assert report.red_edges == census.lens_count


def _with_internal_tangency(seed: int):
    """A random family plus one outer circle internally tangent to one of its circles, or None."""
    rng = np.random.default_rng(seed)
    base = gen_random(GenConfig(n=4 + seed % 3, seed=seed))
    k = int(rng.integers(base.n))
    inner = base[k]
    t = Fraction(int(rng.integers(1, 7)), 10)
    u = Fraction(int(rng.integers(-9, 10)), 10)
    direction = Point((1 - u * u) / (1 + u * u), 2 * u / (1 + u * u))
    outer = Circle.from_radius(inner.center.x + t * direction.x, inner.center.y + t * direction.y, inner.radius + t)
    try:
        return validate_family(list(base.circles) + [outer])
    except FamilyValidationError:
        return None


@pytest.mark.parametrize("seed", range(40))
def test_reduction_keeps_every_lens(seed):
    """Removing outer circles of internal tangencies loses no lens of the surviving circles."""
    f = _with_internal_tangency(seed)
    if f is None:
        pytest.skip("injected circle does not cross the family")
    outers = internally_tangent_outers(f)
    assert outers
    census = digon_census(f)
    for outer in outers:
        assert outer_supports_no_lens(f, outer, census)
    reduced = reduce_internal_tangencies(f)
    assert internally_tangent_outers(reduced) == []
    survivors = surviving_indices(f)
    assert reduced.circles == tuple(f[k] for k in survivors)
    kept = {p for p in census.lens_pairs if p[0] in survivors and p[1] in survivors}
    assert kept == census.lens_pairs
    assert kept <= restrict_census(f, survivors).lens_pairs
    assert census.lens_count <= digon_census(reduced).lens_count
