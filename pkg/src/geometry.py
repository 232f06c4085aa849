"""Circles, pairwise relations, exact intersection points, inversion and inflation."""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from src.errors import FamilyValidationError, InvalidInputError, NoIncidenceError
from src.kernel import (
    QuadraticNumber, RationalLike, filtered_sign, qn_compare, rational_approximation, rational_sqrt,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Point:
    """Exact rational point."""
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def scaled(self, s: RationalLike) -> "Point":
        return Point(self.x * s, self.y * s)

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def to_float(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)


@dataclass(frozen=True)
class Circle:
    """
    Circle with rational center and exact squared radius r2 > 0.

    The squared radius is the primary datum: pencil circles and inflated circles
    have irrational radii but rational squared radii.
    """
    center: Point
    r2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r2", Fraction(self.r2))
        if self.r2 <= 0:
            raise InvalidInputError(f"radius must be positive (r2={self.r2})")

    @classmethod
    def from_radius(cls, cx: RationalLike, cy: RationalLike, r: RationalLike) -> "Circle":
        r = Fraction(r)
        if r <= 0:
            raise InvalidInputError(f"radius must be positive (r={r})")
        return cls(Point(cx, cy), r * r)

    @property
    def radius(self) -> Optional[Fraction]:
        """Rational radius, or None when sqrt(r2) is irrational."""
        return rational_sqrt(self.r2)

    @property
    def radius_qn(self) -> QuadraticNumber:
        return QuadraticNumber.sqrt_of(self.r2)

    def power(self, p: Point) -> Fraction:
        """|p - center|^2 - r^2 (negative inside, zero on, positive outside)."""
        return (p - self.center).norm2() - self.r2

    def to_float(self) -> Tuple[float, float, float]:
        return float(self.center.x), float(self.center.y), float(self.r2) ** 0.5


class PairRelation(str, Enum):
    """Relation between two circles, decided by exact sign tests."""
    TWO_POINTS = "TwoPoints"
    EXTERNALLY_TANGENT = "ExternallyTangent"
    INTERNALLY_TANGENT = "InternallyTangent"
    DISJOINT_OUTSIDE = "DisjointOutside"
    CONTAINED = "Contained"
    IDENTICAL = "Identical"


INTERSECTING = {
    PairRelation.TWO_POINTS,
    PairRelation.EXTERNALLY_TANGENT,
    PairRelation.INTERNALLY_TANGENT,
}
TANGENT = {PairRelation.EXTERNALLY_TANGENT, PairRelation.INTERNALLY_TANGENT}


class Side(str, Enum):
    INSIDE = "inside"
    ON = "on"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Family:
    """Ordered, validated family of pairwise intersecting circles."""
    circles: Tuple[Circle, ...]

    def __len__(self) -> int:
        return len(self.circles)

    def __getitem__(self, i: int) -> Circle:
        return self.circles[i]

    def __iter__(self) -> Iterator[Circle]:
        return iter(self.circles)

    @property
    def n(self) -> int:
        return len(self.circles)

    @property
    def centers(self) -> List[Point]:
        return [c.center for c in self.circles]

    def subfamily(self, indices: Sequence[int]) -> "Family":
        """Circles at `indices`, in that order (pairwise intersection is hereditary)."""
        return Family(tuple(self.circles[i] for i in indices))

    def replace(self, i: int, circle: Circle) -> Tuple[Circle, ...]:
        """Circles with C_i swapped out; callers revalidate."""
        circles = list(self.circles)
        circles[i] = circle
        return tuple(circles)


@dataclass(frozen=True, eq=False)
class AlgebraicPoint:
    """Point whose coordinates are quadratic numbers sharing one radicand."""
    x: QuadraticNumber
    y: QuadraticNumber
    provenance: Optional[Tuple[int, int, str]] = None  # (i, j, branch "+" / "-" / "t")

    @classmethod
    def rational(cls, p: Point, provenance=None) -> "AlgebraicPoint":
        return cls(QuadraticNumber(p.x), QuadraticNumber(p.y), provenance)

    def to_float(self) -> Tuple[float, float]:
        return self.x.to_float(), self.y.to_float()

    def __repr__(self) -> str:
        return f"AlgebraicPoint({self.x!r}, {self.y!r})"


def points_equal(p: AlgebraicPoint, q: AlgebraicPoint) -> bool:
    """Exact equality of two algebraic points (radicands may differ)."""
    return qn_compare(p.x, q.x) == 0 and qn_compare(p.y, q.y) == 0


def classify_pair(c1: Circle, c2: Circle) -> PairRelation:
    """
    Classify two circles from the signs of d^2 - (r1 + r2)^2 and d^2 - (r1 - r2)^2.

    Both quantities are D - R1 - R2 -/+ 2*sqrt(R1*R2) with squared radii R, so the
    tests are exact quadratic-number signs.
    """
    d2 = (c2.center - c1.center).norm2()
    if d2 == 0 and c1.r2 == c2.r2:
        return PairRelation.IDENTICAL
    base = d2 - c1.r2 - c2.r2
    product = c1.r2 * c2.r2
    outer = filtered_sign(QuadraticNumber(base, -2, product))
    if outer > 0:
        return PairRelation.DISJOINT_OUTSIDE
    if outer == 0:
        return PairRelation.EXTERNALLY_TANGENT
    inner = filtered_sign(QuadraticNumber(base, 2, product))
    if inner < 0:
        return PairRelation.CONTAINED
    if inner == 0:
        return PairRelation.INTERNALLY_TANGENT
    return PairRelation.TWO_POINTS


def intersection_points(
    c1: Circle, c2: Circle, i: Optional[int] = None, j: Optional[int] = None
) -> List[AlgebraicPoint]:
    """
    Exact intersection points of two circles (0, 1 or 2 points).

    The points lie on the radical line at base + / - sqrt(h) * perp(o2 - o1) with
    rational base and rational h, so both coordinates share the radicand h.

    Raises:
        InvalidInputError: for identical circles
    """
    relation = classify_pair(c1, c2)
    if relation == PairRelation.IDENTICAL:
        raise InvalidInputError("identical circles have no finite intersection set")
    if relation not in INTERSECTING:
        return []
    delta = c2.center - c1.center
    d2 = delta.norm2()
    t = (d2 + c1.r2 - c2.r2) / (2 * d2)
    base = c1.center + delta.scaled(t)
    if relation in TANGENT:
        return [AlgebraicPoint.rational(base, (i, j, "t"))]
    h = c1.r2 / d2 - t * t
    root = QuadraticNumber.sqrt_of(h)
    plus = AlgebraicPoint(
        QuadraticNumber(base.x) + root * (-delta.y),
        QuadraticNumber(base.y) + root * delta.x,
        (i, j, "+"),
    )
    minus = AlgebraicPoint(
        QuadraticNumber(base.x) + root * delta.y,
        QuadraticNumber(base.y) + root * (-delta.x),
        (i, j, "-"),
    )
    return [plus, minus]


def power_of(p: AlgebraicPoint, c: Circle) -> QuadraticNumber:
    """|p - center|^2 - r^2 as an exact quadratic number (single radicand)."""
    dx = p.x - c.center.x
    dy = p.y - c.center.y
    return dx * dx + dy * dy - c.r2


def side_of_circle(p: AlgebraicPoint, c: Circle) -> Side:
    s = filtered_sign(power_of(p, c))
    if s < 0:
        return Side.INSIDE
    if s == 0:
        return Side.ON
    return Side.OUTSIDE


def family_violations(circles: Sequence[Circle]) -> List[Tuple[int, int, PairRelation]]:
    """Every pair whose relation is not an intersecting one."""
    violations = []
    for i, j in itertools.combinations(range(len(circles)), 2):
        relation = classify_pair(circles[i], circles[j])
        if relation not in INTERSECTING:
            violations.append((i, j, relation))
    return violations


def validate_family(circles: Iterable[Circle]) -> Family:
    """
    Build a Family, checking that every pair intersects (tangency counts).

    Raises:
        FamilyValidationError: listing offending pairs and their relation
    """
    circles = tuple(circles)
    violations = family_violations(circles)
    if violations:
        raise FamilyValidationError(violations)
    return Family(circles)


def internally_tangent_outers(f: Family) -> List[int]:
    """Indices of circles that are the outer circle of some internally tangent pair."""
    outers = set()
    for i, j in itertools.combinations(range(f.n), 2):
        if classify_pair(f[i], f[j]) == PairRelation.INTERNALLY_TANGENT:
            outers.add(i if f[i].r2 > f[j].r2 else j)
    return sorted(outers)


def reduce_internal_tangencies(f: Family) -> Family:
    """
    Remove the outer circle of every internally tangent pair.

    Pair relations do not depend on the other circles, so removing all outer
    circles at once equals removing them one by one until none is left.
    """
    outers = internally_tangent_outers(f)
    if not outers:
        return f
    logger.debug("removing outer circles of internal tangencies: %s", outers)
    removed = set(outers)
    return Family(tuple(c for k, c in enumerate(f.circles) if k not in removed))


def surviving_indices(f: Family) -> List[int]:
    """Indices of f that reduce_internal_tangencies keeps, in order."""
    removed = set(internally_tangent_outers(f))
    return [k for k in range(f.n) if k not in removed]


@dataclass(frozen=True)
class InversionResult:
    family: Family
    invariance_contract: bool  # center strictly outside every disc


def invert_circle(c: Circle, p: Point, k2: Fraction) -> Circle:
    power = c.power(p)
    if power == 0:
        raise InvalidInputError(f"inversion center {p} lies on circle {c}")
    s = k2 / power
    return Circle(p + (c.center - p).scaled(s), s * s * c.r2)


def invert_family(f: Family, p: Point, k: RationalLike) -> InversionResult:
    """
    Invert every circle in the circle of center p and radius k.

    Circle (o, r) maps to center p + s*(o - p) and radius |s|*r with
    s = k^2 / (|o - p|^2 - r^2).

    Raises:
        InvalidInputError: k = 0, or p on some circle
    """
    k = Fraction(k)
    if k == 0:
        raise InvalidInputError("inversion radius k must be non-zero")
    k2 = k * k
    images = tuple(invert_circle(c, p, k2) for c in f)
    contract = all(c.power(p) > 0 for c in f)
    if not contract:
        logger.warning("inversion center %s lies inside a disc: invariance contract void", p)
    return InversionResult(validate_family(images), contract)


@dataclass(frozen=True)
class InflationResult:
    r2: QuadraticNumber  # exact squared radius at the first incidence
    radius: Optional[Fraction]  # rational radius when sqrt(r2) is rational
    point: AlgebraicPoint  # the intersection point reached


def other_intersection_points(f: Family, i: int) -> List[AlgebraicPoint]:
    points = []
    others = [k for k in range(f.n) if k != i]
    for j, k in itertools.combinations(others, 2):
        points.extend(intersection_points(f[j], f[k], j, k))
    return points


def inflate_until_incidence(f: Family, i: int) -> InflationResult:
    """
    Grow C_i about its fixed center until it first passes through an
    intersection point of two other circles.

    Raises:
        InvalidInputError: fewer than 3 circles, or an intersection point of two
            other circles already lies strictly inside D_i
        NoIncidenceError: no intersection point of the other circles exists
    """
    if f.n < 3:
        raise InvalidInputError("inflation needs at least 3 circles")
    circle = f[i]
    best: Optional[Tuple[QuadraticNumber, AlgebraicPoint]] = None
    for q in other_intersection_points(f, i):
        d2 = power_of(q, circle) + circle.r2
        if qn_compare(d2, QuadraticNumber(circle.r2)) < 0:
            raise InvalidInputError(
                f"intersection point {q!r} of circles {q.provenance[:2]} lies inside D_{i}"
            )
        if best is None or qn_compare(d2, best[0]) < 0:
            best = (d2, q)
    if best is None:
        raise NoIncidenceError(f"no incidence reachable for circle {i}")
    r2, point = best
    exact = r2.rational_value()
    radius = rational_sqrt(exact) if exact is not None else None
    return InflationResult(r2, radius, point)


def inflate_family(f: Family, i: int, tolerance: RationalLike = Fraction(1, 10 ** 12)) -> Tuple[Family, InflationResult]:
    """
    Replace C_i by its inflated circle and revalidate.

    The squared radius is exact when rational, else a rational within `tolerance`.
    """
    result = inflate_until_incidence(f, i)
    r2 = rational_approximation(result.r2, Fraction(tolerance))
    family = validate_family(f.replace(i, Circle(f[i].center, r2)))
    return family, result


def cross(a: Point, b: Point, c: Point) -> Fraction:
    """Cross product (b - a) x (c - a), twice the signed triangle area."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def orientation(a: Point, b: Point, c: Point) -> int:
    """Sign of the cross product: +1 left turn, -1 right, 0 collinear."""
    det = cross(a, b, c)
    return (det > 0) - (det < 0)


def collinear_triple_exists(points: Sequence[Point]) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """Exact search for three collinear points; returns the first witness triple."""
    for a, b, c in itertools.combinations(range(len(points)), 3):
        if orientation(points[a], points[b], points[c]) == 0:
            return True, (a, b, c)
    return False, None


def touching_points(f: Family) -> List[Tuple[int, int, AlgebraicPoint]]:
    """Tangency points of all tangent pairs."""
    out = []
    for i, j in itertools.combinations(range(f.n), 2):
        if classify_pair(f[i], f[j]) in TANGENT:
            out.append((i, j, intersection_points(f[i], f[j], i, j)[0]))
    return out


def max_touching_at_point(f: Family) -> int:
    """
    Largest number of circles pairwise touching at one common point.

    Without internal tangencies this never exceeds 2.
    """
    groups: List[Tuple[AlgebraicPoint, nx.Graph]] = []
    for i, j, p in touching_points(f):
        for q, graph in groups:
            if points_equal(p, q):
                graph.add_edge(i, j)
                break
        else:
            graph = nx.Graph()
            graph.add_edge(i, j)
            groups.append((p, graph))
    if not groups:
        return 1 if f.n else 0
    return max(len(clique) for _, graph in groups for clique in nx.find_cliques(graph))
