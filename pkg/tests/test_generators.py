"""Tests for family generators."""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from src.census import digon_census
from src.errors import BudgetExhaustedError, InvalidInputError
from src.generators import (
    GenConfig, default_pencil_abscissas, gen_pencil, gen_random, gen_tight,
    gen_touching_quad, gen_unit,
)
from src.geometry import PairRelation, Point, classify_pair, max_touching_at_point
from src.settings import settings


def test_gen_random_is_deterministic():
    cfg = GenConfig(n=6, seed=3)
    assert gen_random(cfg).circles == gen_random(cfg).circles
    assert gen_random(cfg).circles != gen_random(GenConfig(n=6, seed=4)).circles


def test_gen_random_crosses_everywhere():
    f = gen_random(GenConfig(n=7, seed=11))
    assert f.n == 7
    for i, j in itertools.combinations(range(f.n), 2):
        assert classify_pair(f[i], f[j]) == PairRelation.TWO_POINTS


def test_gen_random_two_circles():
    census = digon_census(gen_random(GenConfig(n=2, seed=0)))
    assert (census.lens_count, census.lune_count) == (1, 2)


def test_gen_random_injects_tangency():
    f = gen_random(GenConfig(n=5, seed=0, tangent_pairs=1))
    assert digon_census(f).tangent_pair_set


def test_gen_random_budget(monkeypatch):
    """Tiny circles spread far apart almost never cross."""
    monkeypatch.setattr(settings, "REJECTION_BUDGET", 50)
    cfg = GenConfig(n=3, seed=0, region=1000.0, radius_min=1.0, radius_max=1.001)
    with pytest.raises(BudgetExhaustedError):
        gen_random(cfg)


def test_gen_config_validation():
    with pytest.raises(ValidationError):
        GenConfig(n=3, radius_min=3.0, radius_max=2.0)
    with pytest.raises(ValidationError):
        GenConfig(n=0)


def test_gen_unit():
    f = gen_unit(GenConfig(n=8, seed=5))
    assert all(c.r2 == 1 for c in f)
    assert len(set(f.centers)) == 8
    assert digon_census(f).lens_count <= f.n


def test_default_pencil_abscissas():
    assert default_pencil_abscissas(4) == [-3, -1, 1, 3]


def test_gen_pencil_lenses_only_between_extremes():
    f = gen_pencil(5)
    assert all(c.r2 == c.center.x ** 2 + 1 for c in f)
    assert digon_census(f).lens_pairs == {(0, 4)}


def test_gen_pencil_custom_abscissas():
    f = gen_pencil(3, [3, -1, Fraction(1, 2)])
    assert [c.center for c in f] == [Point(-1, 0), Point(Fraction(1, 2), 0), Point(3, 0)]
    assert f[1].r2 == Fraction(5, 4)


@pytest.mark.parametrize("n, abscissas", [(1, None), (3, [0, 1]), (3, [0, 1, 1])])
def test_gen_pencil_rejects(n, abscissas):
    with pytest.raises(InvalidInputError):
        gen_pencil(n, abscissas)


def test_gen_touching_quad_general_parameters():
    f = gen_touching_quad(1, 2, 3, 4)
    assert digon_census(f).tangent_pair_set == {(0, 2), (1, 3)}
    assert classify_pair(f[0], f[2]) == PairRelation.EXTERNALLY_TANGENT
    assert max_touching_at_point(f) == 2
    with pytest.raises(InvalidInputError):
        gen_touching_quad(1, 0, 1, 1)


def test_gen_tight_shape():
    f = gen_tight(6)
    assert f.n == 6
    assert f[0].center == Point(-5120, 3840)
    assert f[1].center == Point(-5120, -3840)
    assert f[0].r2 == f[1].r2 == 6400 ** 2
    assert [c.center for c in f.circles[2:]] == [Point(s, 0) for s in (3, 4, 5, 6)]
    assert f[2].r2 == Fraction(369, 64)


@pytest.mark.parametrize("n", [4, 8, 12, 16, 40])
def test_gen_tight_is_pairwise_crossing(n):
    f = gen_tight(n)
    assert f.n == n
    assert all(
        classify_pair(f[i], f[j]) == PairRelation.TWO_POINTS
        for i, j in itertools.combinations(range(n), 2)
    )


def test_gen_tight_range():
    with pytest.raises(InvalidInputError):
        gen_tight(3)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_unit_families_have_at_most_n_lenses(seed):
    f = gen_unit(GenConfig(n=2 + seed % 11, seed=seed))
    assert digon_census(f).lens_count <= f.n


def _pencil_abscissas(seed: int):
    rng = np.random.default_rng(seed)
    k = 3 + seed % 6
    numerators = rng.choice(np.arange(-60, 61), size=k, replace=False)
    return [Fraction(int(a), 1 + seed % 7) for a in numerators]


@pytest.mark.parametrize("seed", range(20))
def test_pencil_has_no_inner_lens(seed):
    abscissas = _pencil_abscissas(seed)
    f = gen_pencil(len(abscissas), abscissas)
    census = digon_census(f)
    assert census.lens_pairs == {(0, f.n - 1)}
