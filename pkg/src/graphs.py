"""
Geometric graphs on circle centers.

Avoiding pairs, the KLV edge bound, the touching-quadrilateral structure behind
every avoiding pair of lens edges, and the charging of such pairs to blue edges.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.errors import BudgetExhaustedError, FalsificationError, InvalidInputError
from src.geometry import (
    Family, PairRelation, Point, Side, classify_pair, collinear_triple_exists, cross,
    intersection_points, orientation, points_equal, side_of_circle,
)
from src.settings import settings

logger = logging.getLogger(__name__)

RED = "red"
BLUE = "blue"


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidInputError(f"degenerate segment at {self.a}")

    @property
    def endpoints(self) -> Tuple[Point, Point]:
        return self.a, self.b


@dataclass(frozen=True, order=True)
class Edge:
    """Undirected edge stored with i < j."""
    i: int
    j: int
    color: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidInputError(f"self-loop at vertex {self.i}")
        if self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    @property
    def key(self) -> Tuple[int, int]:
        return self.i, self.j


@dataclass(frozen=True)
class GeoGraph:
    """Straight-line graph: vertices are points, edges index into them."""
    vertices: Tuple[Point, ...]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            if e.j >= len(self.vertices) or e.i < 0:
                raise InvalidInputError(f"edge {e.key} out of range for {len(self.vertices)} vertices")
            if e.key in seen:
                raise InvalidInputError(f"duplicate edge {e.key}")
            seen.add(e.key)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def segment(self, e: Edge) -> Segment:
        return Segment(self.vertices[e.i], self.vertices[e.j])

    def without(self, removed: Sequence[Edge]) -> "GeoGraph":
        keys = {e.key for e in removed}
        return replace(self, edges=tuple(e for e in self.edges if e.key not in keys))

    def moved_to(self, vertices: Sequence[Point]) -> "GeoGraph":
        return replace(self, vertices=tuple(vertices))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from((e.i, e.j, {"color": e.color}) for e in self.edges)
        return graph


def to_geograph(g: GeoGraph) -> GeoGraph:
    """Plain GeoGraph copy (drops subclass behaviour, keeps colors)."""
    return GeoGraph(g.vertices, g.edges)


def red_edge_count(g: GeoGraph) -> int:
    return sum(1 for e in g.edges if e.color == RED)


def is_avoiding(e: Segment, f: Segment) -> bool:
    """
    Opposite edges of a convex quadrilateral.

    Both endpoints of f lie strictly on one side of the line through e, and both
    endpoints of e strictly on one side of the line through f.
    """
    if {e.a, e.b} & {f.a, f.b}:
        return False
    s1 = orientation(e.a, e.b, f.a)
    s2 = orientation(e.a, e.b, f.b)
    if s1 == 0 or s1 != s2:
        return False
    t1 = orientation(f.a, f.b, e.a)
    t2 = orientation(f.a, f.b, e.b)
    return t1 != 0 and t1 == t2


def _strict_hull(points: Sequence[Point]) -> List[Point]:
    """Convex hull vertices (collinear boundary points dropped), counter-clockwise."""
    pts = sorted(set(points), key=lambda p: (p.x, p.y))
    if len(pts) < 3:
        return pts
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and orientation(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orientation(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_position_avoiding(e: Segment, f: Segment) -> bool:
    """Brute-force definition: four points in strictly convex position, e and f opposite hull edges."""
    points = [e.a, e.b, f.a, f.b]
    if len(set(points)) < 4:
        return False
    hull = _strict_hull(points)
    if len(hull) != 4:
        return False
    position = {p: k for k, p in enumerate(hull)}

    def hull_edge(s: Segment) -> bool:
        return (position[s.a] - position[s.b]) % 4 in (1, 3)

    return hull_edge(e) and hull_edge(f)


def find_avoiding_pairs(g: GeoGraph, threads: Optional[int] = None) -> List[Tuple[Edge, Edge]]:
    """All unordered avoiding edge pairs, in lexicographic edge order."""
    if threads is None:
        threads = settings.effective_threads()
    edges = sorted(g.edges)
    segments = [g.segment(e) for e in edges]

    def row(a: int) -> List[Tuple[Edge, Edge]]:
        return [
            (edges[a], edges[b]) for b in range(a + 1, len(edges))
            if is_avoiding(segments[a], segments[b])
        ]

    if threads > 1 and len(edges) > 2:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(len(edges))))
    else:
        rows = [row(a) for a in range(len(edges))]
    return [pair for r in rows for pair in r]


@dataclass(frozen=True)
class KlvVerdict:
    status: str  # "pass" or "not_applicable"
    edge_count: int
    bound: int
    avoiding_pairs: int

    @property
    def applicable(self) -> bool:
        return self.status == "pass"


def klv_check(g: GeoGraph) -> KlvVerdict:
    """
    Check |E| <= 2|V| - 2 on avoiding-free graphs.

    Raises:
        FalsificationError: an avoiding-free graph with too many edges
    """
    pairs = find_avoiding_pairs(g)
    bound = 2 * g.n - 2
    if pairs:
        return KlvVerdict("not_applicable", g.edge_count, bound, len(pairs))
    if g.edge_count > bound:
        raise FalsificationError(
            "klv", f"avoiding-free graph with {g.edge_count} > {bound} edges",
            {"edges": [list(e.key) for e in g.edges]},
        )
    return KlvVerdict("pass", g.edge_count, bound, 0)


@dataclass(frozen=True)
class Quadrilateral:
    """Clockwise order A1 A2 A3 A4 with e = A1A2 and f = A3A4 (vertex indices)."""
    a1: int
    a2: int
    a3: int
    a4: int

    @property
    def charged_diagonal(self) -> Tuple[int, int]:
        return tuple(sorted((self.a1, self.a3)))

    @property
    def other_diagonal(self) -> Tuple[int, int]:
        return tuple(sorted((self.a2, self.a4)))


def quadrilateral_order(g: GeoGraph, e: Edge, f: Edge) -> Quadrilateral:
    """Orient an avoiding pair so that A1 A2 A3 A4 runs clockwise."""
    p = g.vertices
    a1, a2 = (e.i, e.j) if orientation(p[e.i], p[e.j], p[f.i]) < 0 else (e.j, e.i)
    a3, a4 = (f.i, f.j) if orientation(p[f.i], p[f.j], p[a1]) < 0 else (f.j, f.i)
    return Quadrilateral(a1, a2, a3, a4)


@dataclass(frozen=True)
class CertifiedPair:
    e: Edge
    f: Edge
    quad: Quadrilateral
    meeting_point: Tuple[float, float]


@dataclass(frozen=True)
class MainTheoremReport:
    pairs: Tuple[CertifiedPair, ...]

    @property
    def avoiding_count(self) -> int:
        return len(self.pairs)


def _certify(f: Family, g: GeoGraph, e: Edge, h: Edge) -> CertifiedPair:
    witness = {"e": list(e.key), "f": list(h.key)}
    if e.color != RED or h.color != RED:
        raise FalsificationError("main", "avoiding pair involves a non-lens edge", witness)
    quad = quadrilateral_order(g, e, h)
    witness["quadrilateral"] = [quad.a1, quad.a2, quad.a3, quad.a4]
    for u, v in (quad.charged_diagonal, quad.other_diagonal):
        if classify_pair(f[u], f[v]) != PairRelation.EXTERNALLY_TANGENT:
            raise FalsificationError("main", f"circles {u}, {v} are not externally tangent", witness)
    m = intersection_points(f[quad.a1], f[quad.a3])[0]
    m2 = intersection_points(f[quad.a2], f[quad.a4])[0]
    if not points_equal(m, m2):
        raise FalsificationError("main", "the two tangency points differ", witness)
    for k in (quad.a1, quad.a2, quad.a3, quad.a4):
        if side_of_circle(m, f[k]) != Side.ON:
            raise FalsificationError("main", f"circle {k} misses the common point", witness)
    return CertifiedPair(e, h, quad, m.to_float())


def verify_main_theorem(f: Family, g: GeoGraph) -> MainTheoremReport:
    """
    Every avoiding pair of g must be two lens edges A1A2, A3A4 whose four circles
    pass through one point M, with C1, C3 and C2, C4 externally tangent at M.

    Raises:
        InvalidInputError: g is not a graph on the centers of f
        FalsificationError: an avoiding pair without that structure
    """
    if g.n != f.n or any(v != c.center for v, c in zip(g.vertices, f)):
        raise InvalidInputError("graph vertices are not the centers of the family")
    pairs = tuple(_certify(f, g, e, h) for e, h in find_avoiding_pairs(g))
    logger.debug("certified %d avoiding pairs", len(pairs))
    return MainTheoremReport(pairs)


@dataclass(frozen=True)
class Charge:
    e: Edge
    f: Edge
    removed: Edge
    blue_edge: Tuple[int, int]


@dataclass(frozen=True)
class Resolution:
    graph: GeoGraph
    charges: Tuple[Charge, ...]
    double_charged: Tuple[Tuple[int, int], ...] = ()


def resolve_avoiding_pairs(g: GeoGraph) -> Resolution:
    """
    Remove one red edge per avoiding pair and charge the pair to the blue edge A1A3.

    The lexicographically larger edge of the pair is removed. Pairs already broken
    by an earlier removal are not charged again.

    Raises:
        FalsificationError: a blue edge charged twice, a charged diagonal that is not
            blue, or avoiding pairs left in the result
    """
    blue = {e.key for e in g.edges if e.color == BLUE}
    removed: Dict[Tuple[int, int], Edge] = {}
    charges: List[Charge] = []
    charged: Dict[Tuple[int, int], List[Charge]] = {}
    for e, h in find_avoiding_pairs(g):
        if e.key in removed or h.key in removed:
            continue
        diagonal = quadrilateral_order(g, e, h).charged_diagonal
        if diagonal not in blue:
            raise FalsificationError(
                "main", f"charged diagonal {diagonal} is not a blue edge",
                {"e": list(e.key), "f": list(h.key)},
            )
        victim = max(e, h)
        removed[victim.key] = victim
        charge = Charge(e, h, victim, diagonal)
        charges.append(charge)
        charged.setdefault(diagonal, []).append(charge)

    double = tuple(sorted(k for k, v in charged.items() if len(v) > 1))
    resolved = g.without(list(removed.values()))
    result = Resolution(to_geograph(resolved), tuple(charges), double)
    log = [{"e": list(c.e.key), "f": list(c.f.key), "removed": list(c.removed.key),
            "blue": list(c.blue_edge)} for c in charges]
    if double:
        logger.error("blue edges charged more than once: %s", double)
        raise FalsificationError("charging", "blue edge charged twice",
                                 {"double_charged": [list(d) for d in double], "charges": log})
    residual = find_avoiding_pairs(resolved)
    if residual:
        raise FalsificationError("charging", "avoiding pairs left after resolution",
                                 {"residual": [[list(a.key), list(b.key)] for a, b in residual]})
    if red_edge_count(g) > resolved.edge_count:
        raise FalsificationError("charging", "more removals than charged blue edges", {"charges": log})
    return result


def is_bipartite(g: GeoGraph) -> bool:
    return nx.is_bipartite(g.to_networkx())


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    """p collinear with a, b is within their bounding box."""
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_conflict(s: Segment, t: Segment) -> bool:
    """Closed segments meet anywhere except at one shared endpoint."""
    shared = {s.a, s.b} & {t.a, t.b}
    if len(shared) == 2:
        return True
    if shared:
        p = shared.pop()
        a = s.b if s.a == p else s.a
        b = t.b if t.a == p else t.a
        if orientation(p, a, b) != 0:
            return False
        return (a.x - p.x) * (b.x - p.x) + (a.y - p.y) * (b.y - p.y) > 0
    d1 = orientation(s.a, s.b, t.a)
    d2 = orientation(s.a, s.b, t.b)
    d3 = orientation(t.a, t.b, s.a)
    d4 = orientation(t.a, t.b, s.b)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return (
        (d1 == 0 and _on_segment(t.a, s.a, s.b))
        or (d2 == 0 and _on_segment(t.b, s.a, s.b))
        or (d3 == 0 and _on_segment(s.a, t.a, t.b))
        or (d4 == 0 and _on_segment(s.b, t.a, t.b))
    )


def is_plane_embedding(g: GeoGraph) -> bool:
    """No two straight-line edges cross or overlap; shared endpoints are allowed."""
    segments = [g.segment(e) for e in g.edges]
    for s, t in itertools.combinations(segments, 2):
        if segments_conflict(s, t):
            logger.debug("edges conflict: %s / %s", s, t)
            return False
    return True


def lens_edge_collinearities(g: GeoGraph) -> List[Tuple[Edge, int]]:
    """(edge, vertex) pairs where a vertex off the edge lies on the edge's supporting line."""
    out = []
    for e in g.edges:
        a, b = g.vertices[e.i], g.vertices[e.j]
        for k, v in enumerate(g.vertices):
            if k not in e.key and orientation(a, b, v) == 0:
                out.append((e, k))
    return out


def _sqrt_lower_bound(q: Fraction) -> Fraction:
    """A positive rational not exceeding sqrt(q) for q > 0."""
    bits = 0
    while q * (1 << (2 * bits)) < 1:
        bits += 1
    scaled = q * (1 << (2 * bits))
    return Fraction(math.isqrt(scaled.numerator // scaled.denominator), 1 << bits)


def _sign_safe_step(points: Sequence[Point]) -> Optional[Fraction]:
    """
    Per-coordinate shift that keeps every nonzero orientation sign.

    With m the largest |dx| + |dy| over pairs (an upper bound on every distance),
    moving each point by at most rho changes an orientation determinant by at most
    4 rho m + 4 rho^2, which stays below |det| / 2 for rho <= min|det| / (16 m).
    A coordinate shift below step moves a point by less than 2 step = rho.
    """
    dets = [abs(cross(a, b, c)) for a, b, c in itertools.combinations(points, 3)]
    nonzero = [d for d in dets if d]
    if not nonzero:
        return None
    m = max(abs(p.x - q.x) + abs(p.y - q.y) for p, q in itertools.combinations(points, 2))
    return min(nonzero) / (32 * m)


def perturb_general_position(
    points: Sequence[Point], seed: int = 0, budget: Optional[int] = None,
) -> List[Point]:
    """
    Move each point by less than (min pairwise distance) / 2**PERTURB_SHIFT_EXPONENT so
    that no three are collinear. The shift is also small enough that no triple with a
    nonzero orientation changes sign. Points already in general position are returned as is.

    Raises:
        InvalidInputError: repeated points
        BudgetExhaustedError: no valid perturbation within `budget` attempts
    """
    points = list(points)
    if not collinear_triple_exists(points)[0]:
        return points
    if budget is None:
        budget = settings.PERTURB_BUDGET
    if len(set(points)) < len(points):
        raise InvalidInputError("cannot perturb repeated points into general position")
    min_d2 = min((p - q).norm2() for p, q in itertools.combinations(points, 2))
    # each coordinate moves by < step, so the displacement is < step * sqrt(2) < delta
    step = _sqrt_lower_bound(min_d2) / (1 << (settings.PERTURB_SHIFT_EXPONENT + 1))
    sign_safe = _sign_safe_step(points)
    if sign_safe is not None and sign_safe < step:
        logger.debug("near-collinear triple, shift reduced to %s", float(sign_safe))
        step = sign_safe
    scale = 1 << 20
    rng = np.random.default_rng(seed)
    for attempt in range(budget):
        offsets = rng.integers(-scale + 1, scale, size=(len(points), 2))
        moved = [
            Point(p.x + step * Fraction(int(dx), scale), p.y + step * Fraction(int(dy), scale))
            for p, (dx, dy) in zip(points, offsets)
        ]
        if not collinear_triple_exists(moved)[0]:
            logger.debug("general position after %d attempt(s)", attempt + 1)
            return moved
    raise BudgetExhaustedError(f"no general-position perturbation in {budget} attempts")


@dataclass(frozen=True)
class PipelineReport:
    """The lens-bound argument executed on one family."""
    main: MainTheoremReport
    resolution: Resolution
    collinearities: Tuple[Tuple[Edge, int], ...]
    perturbed: bool
    klv: KlvVerdict
    red_edges: int

    @property
    def bound(self) -> int:
        return self.klv.bound

    @property
    def ok(self) -> bool:
        return self.klv.applicable and self.red_edges <= self.bound


def klv_pipeline(f: Family, g: GeoGraph, seed: int = 0) -> PipelineReport:
    """
    verify_main_theorem, resolve_avoiding_pairs, then KLV on the resolved graph.

    The resolved graph is perturbed into general position first unless one of its
    edges is collinear with another vertex; perturbing would then be able to create
    new avoiding pairs, and the unperturbed graph is checked instead.

    Raises:
        FalsificationError: from any stage, or when the perturbed graph gains an avoiding pair
    """
    main = verify_main_theorem(f, g)
    resolution = resolve_avoiding_pairs(g)
    resolved = resolution.graph
    collinear = tuple(lens_edge_collinearities(resolved))
    perturbed = False
    checked = resolved
    if not collinear:
        moved = perturb_general_position(resolved.vertices, seed)
        perturbed = moved != list(resolved.vertices)
        checked = resolved.moved_to(moved)
        if find_avoiding_pairs(checked):
            raise FalsificationError("klv", "perturbation created avoiding pairs",
                                     {"edges": [list(e.key) for e in checked.edges]})
    else:
        logger.info("%d edge/vertex collinearities, checking KLV unperturbed", len(collinear))
    klv = klv_check(checked)
    report = PipelineReport(main, resolution, collinear, perturbed, klv, red_edge_count(g))
    if klv.applicable and report.red_edges > klv.bound:
        raise FalsificationError("lenses", f"{report.red_edges} red edges > {klv.bound}")
    return report
