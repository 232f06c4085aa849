"""Constructors of pairwise intersecting families, random and closed-form."""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.errors import BudgetExhaustedError, FamilyValidationError, InvalidInputError
from src.geometry import Circle, Family, PairRelation, Point, classify_pair, validate_family
from src.kernel import RationalLike
from src.settings import settings

logger = logging.getLogger(__name__)


class GenConfig(BaseModel):
    """Parameters of the random generators; sampled values snap to multiples of 1/denominator."""
    n: int = Field(ge=1)
    seed: int = 0
    radius_min: float = Field(default=1.0, gt=0)
    radius_max: float = Field(default=2.0, gt=0)
    region: float = Field(default=1.0, gt=0)  # centers in [-region, region]^2
    tangent_pairs: int = Field(default=0, ge=0)
    denominator: int = Field(default=1000, ge=1)

    @model_validator(mode="after")
    def check_ranges(self) -> "GenConfig":
        if self.radius_min > self.radius_max:
            raise ValueError("radius_min must not exceed radius_max")
        return self


def _snap(x: float, denominator: int) -> Fraction:
    return Fraction(round(x * denominator), denominator)


def _rational_unit(rng: np.random.Generator, denominator: int) -> Point:
    """Exact unit vector ((1 - t^2) / (1 + t^2), 2t / (1 + t^2)) for a random rational t."""
    t = Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
    u = Point((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t))
    return u if rng.random() < 0.5 else u.scaled(-1)


def _crosses_all(circle: Circle, others: Sequence[Circle]) -> bool:
    return all(classify_pair(circle, other) == PairRelation.TWO_POINTS for other in others)


def _inject_tangency(
    circles: List[Circle], radii: List[Fraction], rng: np.random.Generator, cfg: GenConfig,
) -> bool:
    """Move one circle so that it touches another externally; False if the move breaks validity."""
    i, j = (int(k) for k in rng.choice(len(circles), size=2, replace=False))
    u = _rational_unit(rng, cfg.denominator)
    center = circles[i].center + u.scaled(radii[i] + radii[j])
    moved = Circle(center, radii[j] * radii[j])
    candidate = list(circles)
    candidate[j] = moved
    try:
        validate_family(candidate)
    except FamilyValidationError:
        return False
    circles[j] = moved
    logger.debug("injected tangency between circles %d and %d", i, j)
    return True


def gen_random(cfg: GenConfig) -> Family:
    """
    Rejection-sample circles one at a time until each crosses all previous ones in two points.

    Raises:
        BudgetExhaustedError: after REJECTION_BUDGET rejected samples
    """
    rng = np.random.default_rng(cfg.seed)
    budget = settings.REJECTION_BUDGET
    attempts = 0
    circles: List[Circle] = []
    radii: List[Fraction] = []
    while len(circles) < cfg.n:
        attempts += 1
        if attempts > budget:
            raise BudgetExhaustedError(
                f"rejection budget {budget} exhausted at {len(circles)}/{cfg.n} circles; "
                "widen the radius range or shrink the center region"
            )
        x, y = rng.uniform(-cfg.region, cfg.region, size=2)
        r = _snap(rng.uniform(cfg.radius_min, cfg.radius_max), cfg.denominator)
        if r <= 0:
            continue
        circle = Circle.from_radius(_snap(x, cfg.denominator), _snap(y, cfg.denominator), r)
        if _crosses_all(circle, circles):
            circles.append(circle)
            radii.append(r)

    injected = 0
    while injected < cfg.tangent_pairs:
        attempts += 1
        if attempts > budget:
            raise BudgetExhaustedError(f"could not inject {cfg.tangent_pairs} tangencies within budget {budget}")
        if cfg.n >= 2 and _inject_tangency(circles, radii, rng, cfg):
            injected += 1
    return validate_family(circles)


def gen_unit(cfg: GenConfig) -> Family:
    """Unit circles with distinct centers in a disc of radius < 1, hence pairwise crossing."""
    rng = np.random.default_rng(cfg.seed)
    spread = 0.99 * min(cfg.region, 1.0)
    centers = set()
    circles: List[Circle] = []
    while len(circles) < cfg.n:
        rho = spread * np.sqrt(rng.random())
        phi = rng.uniform(0.0, 2.0 * np.pi)
        p = Point(_snap(rho * np.cos(phi), cfg.denominator), _snap(rho * np.sin(phi), cfg.denominator))
        if p in centers or p.norm2() >= 1:
            continue
        centers.add(p)
        circles.append(Circle(p, 1))
    return validate_family(circles)


def default_pencil_abscissas(k: int) -> List[Fraction]:
    """-(k-1), -(k-3), ..., k-1."""
    return [Fraction(a) for a in range(-(k - 1), k, 2)]


def gen_pencil(n: int, abscissas: Optional[Sequence[RationalLike]] = None) -> Family:
    """
    Circles through (0, 1) and (0, -1): center (a, 0) and squared radius a^2 + 1.

    Raises:
        InvalidInputError: fewer than 2 circles, a length mismatch, or repeated abscissas
    """
    if n < 2:
        raise InvalidInputError("a pencil needs at least 2 circles")
    xs = [Fraction(a) for a in abscissas] if abscissas is not None else default_pencil_abscissas(n)
    if len(xs) != n:
        raise InvalidInputError(f"expected {n} abscissas, got {len(xs)}")
    if len(set(xs)) != n:
        raise InvalidInputError("pencil abscissas must be distinct")
    return validate_family(Circle(Point(a, 0), a * a + 1) for a in sorted(xs))


def gen_touching_quad(a: RationalLike, b: RationalLike, c: RationalLike, d: RationalLike) -> Family:
    """
    Four circles through the origin in clockwise order top, right, bottom, left.

    Top and bottom touch at the origin, so do right and left; neighbours cross.
    """
    a, b, c, d = (Fraction(v) for v in (a, b, c, d))
    if min(a, b, c, d) <= 0:
        raise InvalidInputError("touching-quad parameters must be positive")
    return validate_family([
        Circle.from_radius(0, a, a),
        Circle.from_radius(c, 0, c),
        Circle.from_radius(0, -b, b),
        Circle.from_radius(-d, 0, d),
    ])


# Two large circles through the origin, tangent there to the lines of slope
# +-4/3, and m = n - 2 small circles centered at s = m-1 .. 2m-2 on the x-axis
# with radius s * r0, r0^2 = 16/25 + delta^2. Each small disc pokes into each
# large disc by a thin cap at distances s * (3/5 +- delta) from the origin, so
# the caps are disjoint and each is a lens; the large pair adds one more, and
# the smallest and largest small circles a last one (every middle disc
# contains their lens).
TIGHT_DIRECTION = (Fraction(-4, 5), Fraction(3, 5))


def tight_parameters(n: int) -> Tuple[Fraction, Fraction, List[Fraction]]:
    """(large radius R, small r0^2, small center abscissas) of the tight family on n circles."""
    m = n - 2
    delta = Fraction(1, 10 * m)
    large = Fraction(100 * m ** 3)  # R * delta^2 = m keeps every small circle crossing both large ones
    return large, Fraction(16, 25) + delta * delta, [Fraction(s) for s in range(m - 1, 2 * m - 1)]


def gen_tight(n: int) -> Family:
    """
    Family of n >= 4 circles with exactly 2n - 2 lenses.

    Raises:
        InvalidInputError: n < 4
    """
    if n < 4:
        raise InvalidInputError("the lens bound is tight only for n >= 4")
    large, small_r2, abscissas = tight_parameters(n)
    ux, uy = TIGHT_DIRECTION
    circles = [
        Circle(Point(large * ux, large * uy), large * large),
        Circle(Point(large * ux, -large * uy), large * large),
    ]
    circles += [Circle(Point(s, 0), s * s * small_r2) for s in abscissas]
    return validate_family(circles)
