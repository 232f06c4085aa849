"""Exact lens / lune / tangency census, the red-blue centers graph, and bound verdicts."""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.errors import FalsificationError, InvalidInputError
from src.geometry import (
    TANGENT, AlgebraicPoint, Circle, Family, PairRelation, Side,
    classify_pair, intersection_points, points_equal, side_of_circle,
)
from src.graphs import BLUE, RED, Edge, GeoGraph, red_edge_count
from src.kernel import QuadraticNumber
from src.settings import settings

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class RegionKind(str, Enum):
    LENS = "lens"
    LUNE = "lune"


@lru_cache(maxsize=65536)
def _relation(c1: Circle, c2: Circle) -> PairRelation:
    return classify_pair(c1, c2)


@lru_cache(maxsize=65536)
def _points(c1: Circle, c2: Circle) -> Tuple[AlgebraicPoint, ...]:
    return tuple(intersection_points(c1, c2))


def _wanted_sides(kind: RegionKind) -> Tuple[Side, Side]:
    """Side of C_i and of C_j on which the region lies."""
    if kind == RegionKind.LENS:
        return Side.INSIDE, Side.INSIDE
    return Side.INSIDE, Side.OUTSIDE


def region_contains(kind: RegionKind, p: AlgebraicPoint, ci: Circle, cj: Circle) -> bool:
    """Membership of p in the closed lens D_i & D_j, or closed lune D_i minus int D_j."""
    want_i, want_j = _wanted_sides(kind)
    return side_of_circle(p, ci) in (want_i, Side.ON) and side_of_circle(p, cj) in (want_j, Side.ON)


def _sample_points(
    ck: Circle, ci: Circle, cj: Circle, through: List[AlgebraicPoint], touched: List[AlgebraicPoint],
) -> List[AlgebraicPoint]:
    """
    Exact points of C_k, one on each arc of C_k cut by the region vertices it passes.

    Through both vertices, the chord v1v2 is perpendicular to the center line of
    C_i and C_j, so the arc midpoints of C_k lie along that rational direction.
    Otherwise one axis-aligned point of C_k that is neither a vertex nor a tolerated
    tangency point suffices.
    """
    o = ck.center
    if len(through) == 2:
        direction = cj.center - ci.center
        root = QuadraticNumber.sqrt_of(ck.r2 / direction.norm2())
        return [
            AlgebraicPoint(QuadraticNumber(o.x) + root * (s * direction.x),
                           QuadraticNumber(o.y) + root * (s * direction.y))
            for s in (1, -1)
        ]
    r = ck.radius_qn
    candidates = [
        AlgebraicPoint(r + o.x, QuadraticNumber(o.y)),
        AlgebraicPoint(-r + o.x, QuadraticNumber(o.y)),
        AlgebraicPoint(QuadraticNumber(o.x), r + o.y),
        AlgebraicPoint(QuadraticNumber(o.x), -r + o.y),
    ]
    for candidate in candidates:
        if not any(points_equal(candidate, v) for v in through + touched):
            return [candidate]
    raise AssertionError("four distinct points of a circle cannot all be contact points")


def region_blocked(
    f: Family, k: int, i: int, j: int, kind: RegionKind = RegionKind.LENS,
    lenient: Optional[bool] = None,
) -> bool:
    """
    Does C_k meet the closed candidate region anywhere other than its two vertices?

    1. Points of C_k on C_i / C_j other than the vertices that lie on the region
       boundary block (strictly inside, or a tangency subdividing an edge).
    2. Otherwise C_k crosses the boundary only at vertices, so each arc of C_k between
       the vertices it passes is wholly inside or wholly outside the region; one exact
       sample point per arc decides.

    With `lenient`, a tangency of C_k with a supporting circle on the boundary does not
    block by itself: C_k then lies on one side of that circle, and it blocks only if
    that side is the region's side.

    Raises:
        InvalidInputError: (i, j) is not a two-point pair, or k in {i, j}
    """
    if lenient is None:
        lenient = settings.LENIENT_TANGENCY_FACES
    if k in (i, j):
        raise InvalidInputError(f"blocking circle {k} must differ from {i}, {j}")
    ci, cj, ck = f[i], f[j], f[k]
    if _relation(ci, cj) != PairRelation.TWO_POINTS:
        raise InvalidInputError(f"pair ({i}, {j}) is not a two-point pair")
    vertices = _points(ci, cj)
    wanted = dict(zip((i, j), _wanted_sides(kind)))
    touched: List[AlgebraicPoint] = []

    for m, other in ((i, j), (j, i)):
        cm = f[m]
        relation = _relation(ck, cm)
        for p in _points(ck, cm):
            if any(points_equal(p, v) for v in vertices):
                continue
            if side_of_circle(p, f[other]) not in (wanted[other], Side.ON):
                continue
            if lenient and relation in TANGENT:
                k_inside_m = relation == PairRelation.INTERNALLY_TANGENT and ck.r2 < cm.r2
                k_side = Side.INSIDE if k_inside_m else Side.OUTSIDE
                if k_side == wanted[m]:
                    return True
                touched.append(p)
                continue
            return True

    through = [v for v in vertices if side_of_circle(v, ck) == Side.ON]
    return any(region_contains(kind, p, ci, cj) for p in _sample_points(ck, ci, cj, through, touched))


def is_lens(f: Family, i: int, j: int, lenient: Optional[bool] = None) -> bool:
    """D_i & D_j is a two-edge face of the arrangement."""
    if i == j or _relation(f[i], f[j]) != PairRelation.TWO_POINTS:
        return False
    return not any(
        region_blocked(f, k, i, j, RegionKind.LENS, lenient)
        for k in range(f.n) if k not in (i, j)
    )


def is_lune(f: Family, i: int, j: int, lenient: Optional[bool] = None) -> bool:
    """D_i minus int D_j is a two-edge face of the arrangement (ordered pair)."""
    if i == j or _relation(f[i], f[j]) != PairRelation.TWO_POINTS:
        return False
    return not any(
        region_blocked(f, k, i, j, RegionKind.LUNE, lenient)
        for k in range(f.n) if k not in (i, j)
    )


@dataclass(frozen=True)
class DigonCensus:
    """
    Digons of a family.

    Lenses are counted per unordered pair; lunes per ordered pair (i, j) meaning the
    face D_i minus int D_j, so lune_count counts faces.
    """
    n: int
    lens_pairs: FrozenSet[Pair]
    lune_pairs: FrozenSet[Pair]
    tangent_pairs: Tuple[Tuple[int, int, Optional[AlgebraicPoint]], ...] = ()

    @property
    def lens_count(self) -> int:
        return len(self.lens_pairs)

    @property
    def lune_count(self) -> int:
        return len(self.lune_pairs)

    @property
    def lune_edge_count(self) -> int:
        """Unordered pairs with at least one lune; the edge count of the lune graph."""
        return len({tuple(sorted(p)) for p in self.lune_pairs})

    @property
    def tangent_pair_set(self) -> FrozenSet[Pair]:
        return frozenset((i, j) for i, j, _ in self.tangent_pairs)

    def same_digons(self, other: "DigonCensus") -> bool:
        """Field-by-field agreement (tangency points compared by pair)."""
        return (
            self.n == other.n
            and self.lens_pairs == other.lens_pairs
            and self.lune_pairs == other.lune_pairs
            and self.tangent_pair_set == other.tangent_pair_set
        )


def _pair_digons(args) -> Tuple[Pair, PairRelation, bool, bool, bool]:
    f, i, j, lenient = args
    relation = _relation(f[i], f[j])
    if relation != PairRelation.TWO_POINTS:
        return (i, j), relation, False, False, False
    return (
        (i, j), relation,
        is_lens(f, i, j, lenient), is_lune(f, i, j, lenient), is_lune(f, j, i, lenient),
    )


def digon_census(f: Family, lenient: Optional[bool] = None, threads: Optional[int] = None) -> DigonCensus:
    """
    Exhaustive exact census over all pairs, O(n^3) predicate calls.

    Pairs are evaluated in a thread pool when more than one worker is configured;
    executor.map keeps the sequential order, so the result is identical.
    """
    if lenient is None:
        lenient = settings.LENIENT_TANGENCY_FACES
    if threads is None:
        threads = settings.effective_threads()
    jobs = [(f, i, j, lenient) for i, j in itertools.combinations(range(f.n), 2)]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_pair_digons, jobs))
    else:
        results = [_pair_digons(job) for job in jobs]

    lenses, lunes, tangents = set(), set(), []
    for (i, j), relation, lens, lune_ij, lune_ji in results:
        if lens:
            lenses.add((i, j))
        if lune_ij:
            lunes.add((i, j))
        if lune_ji:
            lunes.add((j, i))
        if relation in TANGENT:
            tangents.append((i, j, _points(f[i], f[j])[0]))
    census = DigonCensus(f.n, frozenset(lenses), frozenset(lunes), tuple(tangents))
    logger.debug("census n=%d lenses=%d lunes=%d tangencies=%d",
                 f.n, census.lens_count, census.lune_count, len(tangents))
    return census


def restrict_census(f: Family, indices: Sequence[int], lenient: Optional[bool] = None) -> DigonCensus:
    """Census of the subfamily at `indices`, reported in the original indexing."""
    indices = list(indices)
    sub = digon_census(f.subfamily(indices), lenient)

    def back(pair: Pair) -> Pair:
        return indices[pair[0]], indices[pair[1]]

    return DigonCensus(
        f.n,
        frozenset(tuple(sorted(back(p))) for p in sub.lens_pairs),
        frozenset(back(p) for p in sub.lune_pairs),
        tuple((*sorted(back((i, j))), p) for i, j, p in sub.tangent_pairs),
    )


def outer_supports_no_lens(f: Family, outer: int, census: Optional[DigonCensus] = None) -> bool:
    """The outer circle of an internally tangent pair creates no lens."""
    census = census or digon_census(f)
    return not any(outer in pair for pair in census.lens_pairs)


class CentersGraph(GeoGraph):
    """Geometric graph on circle centers: red = lens pair, blue = tangent pair."""

    @property
    def red_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.color == RED]

    @property
    def blue_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.color == BLUE]


def centers_graph(f: Family, census: DigonCensus) -> CentersGraph:
    edges = [Edge(i, j, RED) for i, j in sorted(census.lens_pairs)]
    edges += [Edge(i, j, BLUE) for i, j in sorted(census.tangent_pair_set)]
    return CentersGraph(tuple(f.centers), tuple(edges))


def lune_graph(f: Family, census: DigonCensus) -> GeoGraph:
    """One edge per unordered pair admitting at least one lune."""
    pairs = sorted({tuple(sorted(p)) for p in census.lune_pairs})
    return GeoGraph(tuple(f.centers), tuple(Edge(i, j) for i, j in pairs))


@dataclass(frozen=True)
class BoundReport:
    n: int
    lens_count: int
    lune_count: int
    lens_max: int
    lune_max: Optional[int]
    lens_ok: bool
    lune_ok: bool
    lune_vacuous: bool
    witnesses: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lens_ok and self.lune_ok

    def raise_on_failure(self) -> None:
        if not self.lens_ok:
            raise FalsificationError("lenses", "more than 2n-2 lenses", self.witnesses)
        if not self.lune_ok:
            raise FalsificationError("lunes", "more than 2n-4 lune pairs", self.witnesses)


def check_bounds(census: DigonCensus) -> BoundReport:
    """
    Verdicts for the 2n-2 lens bound and the 2n-4 lune bound (n >= 3).

    The lune bound counts unordered lune pairs: a pencil has lunes on both sides
    of a pair, so its lune faces may exceed 2n-4.
    """
    n = census.n
    lens_max = 2 * n - 2
    lens_ok = census.lens_count <= lens_max
    vacuous = n < 3
    lune_max = None if vacuous else 2 * n - 4
    lune_ok = vacuous or census.lune_edge_count <= lune_max
    witnesses: Dict[str, object] = {}
    if not lens_ok:
        witnesses["lens_pairs"] = sorted(census.lens_pairs)
    if not lune_ok:
        witnesses["lune_pairs"] = sorted(census.lune_pairs)
    if vacuous:
        logger.debug("lune bound vacuous for n=%d", n)
    return BoundReport(n, census.lens_count, census.lune_count, lens_max, lune_max,
                       lens_ok, lune_ok, vacuous, witnesses)


__all__ = [
    "RegionKind", "region_blocked", "region_contains", "is_lens", "is_lune", "DigonCensus",
    "digon_census", "restrict_census", "outer_supports_no_lens", "CentersGraph",
    "centers_graph", "lune_graph", "BoundReport", "check_bounds", "red_edge_count",
]
