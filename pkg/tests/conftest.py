"""Shared families for the test suite."""
from pathlib import Path

import pytest

from src.generators import GenConfig, gen_random, gen_tight, gen_touching_quad
from src.schemas import parse_family

FIXTURES = Path(__file__).parent / "fixtures"


def load_family(name: str):
    """Parse a family file from tests/fixtures."""
    return parse_family((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def two_circles():
    return load_family("two_circles.json")


@pytest.fixture
def touching_quad():
    return gen_touching_quad(1, 1, 2, 2)


@pytest.fixture
def pencil3():
    return load_family("pencil3.json")


@pytest.fixture
def tight5():
    return gen_tight(5)


@pytest.fixture(scope="session")
def random_corpus():
    """Tangency-free random families, n = 3..7, a few seeds each."""
    return [gen_random(GenConfig(n=n, seed=seed)) for n in range(3, 8) for seed in range(3)]
