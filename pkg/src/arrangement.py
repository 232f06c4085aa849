"""
Float-mode arrangement of a circle family (vertices, arcs, faces).

Independent oracle for the exact census: faces are traced through half-edge
next pointers, so a digon here is literally a two-edge face.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.census import DigonCensus
from src.errors import DegenerateInputError, InternalConsistencyError
from src.geometry import Family
from src.settings import settings

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArrVertex:
    index: int
    position: Tuple[float, float]
    circles: Tuple[int, ...]
    merge_radius: float


@dataclass(frozen=True)
class HalfEdge:
    """
    Arc of one circle between consecutive vertices, oriented so that its face is on the left.

    Counter-clockwise half-edges bound faces inside the disc; their twins run
    clockwise and bound faces outside. A vertexless circle is one closed loop.
    """
    index: int
    circle: int
    source: Optional[int]
    target: Optional[int]
    ccw: bool
    start_angle: float
    sweep: float
    twin: int
    next: int
    face: int


@dataclass(frozen=True)
class ArrFace:
    index: int
    boundary: Tuple[int, ...]
    bounded: bool
    point: Tuple[float, float]
    discs: int
    signed_area: float

    @property
    def edge_count(self) -> int:
        return len(self.boundary)

    def inside(self, k: int) -> bool:
        return bool(self.discs >> k & 1)


@dataclass(frozen=True)
class Arrangement:
    n: int
    vertices: Tuple[ArrVertex, ...]
    half_edges: Tuple[HalfEdge, ...]
    faces: Tuple[ArrFace, ...]
    eps: float

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.half_edges) // 2

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def unbounded_face(self) -> ArrFace:
        return next(face for face in self.faces if not face.bounded)


class _Frame:
    """Family rescaled so that the bounding box of its discs has diameter 2."""

    def __init__(self, f: Family):
        self.centers = np.array([[float(c.center.x), float(c.center.y)] for c in f], dtype=float)
        self.radii = np.sqrt(np.array([float(c.r2) for c in f], dtype=float))
        lo = (self.centers - self.radii[:, None]).min(axis=0)
        hi = (self.centers + self.radii[:, None]).max(axis=0)
        self.scale = 2.0 / float(np.hypot(*(hi - lo)))
        self.shift = (lo + hi) / 2.0
        self.c = (self.centers - self.shift) * self.scale
        self.r = self.radii * self.scale

    def to_world(self, p: np.ndarray) -> Tuple[float, float]:
        x, y = p / self.scale + self.shift
        return float(x), float(y)


def _crossings(frame: _Frame, i: int, j: int, eps: float, ambiguity: float) -> Tuple[np.ndarray, np.ndarray]:
    c, r = frame.c, frame.r
    delta = c[j] - c[i]
    d = float(np.hypot(*delta))
    if d < ambiguity * eps:
        raise DegenerateInputError(f"circles {i}, {j} are (nearly) concentric; use the exact census")
    a = (d * d + r[i] ** 2 - r[j] ** 2) / (2.0 * d)
    h2 = r[i] ** 2 - a * a
    if h2 <= 0.0 or 2.0 * math.sqrt(h2) < ambiguity * eps:
        raise DegenerateInputError(f"circles {i}, {j} are (nearly) tangent; use the exact census")
    h = math.sqrt(h2)
    base = c[i] + delta * (a / d)
    perp = np.array([-delta[1], delta[0]]) / d
    return base + h * perp, base - h * perp


def _cluster(frame: _Frame, eps: float, ambiguity: float) -> Tuple[np.ndarray, List[set]]:
    """Merge crossing points closer than eps; distances in [eps, ambiguity * eps) are fatal."""
    n = len(frame.r)
    positions = np.zeros((n * (n - 1), 2))
    members: List[set] = []
    for i, j in itertools.combinations(range(n), 2):
        for p in _crossings(frame, i, j, eps, ambiguity):
            m = len(members)
            if m:
                dist = np.hypot(*(positions[:m] - p).T)
                close = np.flatnonzero(dist < ambiguity * eps)
                if len(close) == 1 and dist[close[0]] < eps:
                    members[close[0]].update((i, j))
                    continue
                if len(close):
                    raise DegenerateInputError(
                        f"ambiguous vertex clustering near crossing of circles {i}, {j}; use the exact census"
                    )
            positions[m] = p
            members.append({i, j})
    return positions[:len(members)], members


def _arc_area(cx: float, cy: float, r: float, start: float, sweep: float) -> float:
    """Green's integral 1/2 (x dy - y dx) along a counter-clockwise arc."""
    end = start + sweep
    return 0.5 * (r * cx * (math.sin(end) - math.sin(start))
                  - r * cy * (math.cos(end) - math.cos(start))
                  + r * r * sweep)


def build_arrangement(f: Family, eps: Optional[float] = None) -> Arrangement:
    """
    Build the arrangement of a valid family in float arithmetic.

    Tolerances apply after rescaling the family to a bounding box of diameter 2.

    Raises:
        DegenerateInputError: tangencies, near-concentric pairs or ambiguous clustering
    """
    if eps is None:
        eps = settings.FLOAT_EPS
    ambiguity = settings.FLOAT_AMBIGUITY_FACTOR
    frame = _Frame(f)
    n = f.n
    positions, members = _cluster(frame, eps, ambiguity)
    triples = sum(1 for m in members if len(m) > 2)
    if triples:
        logger.info("%d vertices shared by three or more circles", triples)

    # half-edge arrays: circle, source, target, ccw, start angle, sweep
    circle, source, target, ccw, start, sweep = [], [], [], [], [], []
    twin: List[int] = []
    for k in range(n):
        on_k = [v for v, m in enumerate(members) if k in m]
        if not on_k:
            base = len(twin)
            circle += [k, k]
            source += [None, None]
            target += [None, None]
            ccw += [True, False]
            start += [0.0, 0.0]
            sweep += [TWO_PI, TWO_PI]
            twin += [base + 1, base]
            continue
        rel = positions[on_k] - frame.c[k]
        angles = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
        order = np.argsort(angles, kind="stable")
        ring = [on_k[t] for t in order]
        thetas = [float(angles[t]) for t in order]
        for s in range(len(ring)):
            t = (s + 1) % len(ring)
            arc = (thetas[t] - thetas[s]) % TWO_PI
            base = len(twin)
            circle += [k, k]
            source += [ring[s], ring[t]]
            target += [ring[t], ring[s]]
            ccw += [True, False]
            start += [thetas[s], thetas[s]]
            sweep += [arc, arc]
            twin += [base + 1, base]

    # rotational order of outgoing half-edges by tangent direction
    outgoing: Dict[int, List[Tuple[float, int]]] = {}
    for h in range(len(twin)):
        if source[h] is None:
            continue
        theta = start[h] if ccw[h] else start[h] + sweep[h]
        direction = theta + (math.pi / 2 if ccw[h] else -math.pi / 2)
        outgoing.setdefault(source[h], []).append((direction % TWO_PI, h))
    rank: Dict[int, Tuple[int, int]] = {}
    for v, edges in outgoing.items():
        edges.sort()
        for idx, (_, h) in enumerate(edges):
            rank[h] = (v, idx)

    nxt = [-1] * len(twin)
    for h in range(len(twin)):
        if target[h] is None:
            nxt[h] = h
            continue
        v, idx = rank[twin[h]]
        ring = outgoing[v]
        nxt[h] = ring[(idx - 1) % len(ring)][1]

    # faces as next-cycles
    face_of = [-1] * len(twin)
    cycles: List[List[int]] = []
    for h in range(len(twin)):
        if face_of[h] >= 0:
            continue
        cycle, g = [], h
        while face_of[g] < 0:
            face_of[g] = len(cycles)
            cycle.append(g)
            g = nxt[g]
        if g != h:
            raise InternalConsistencyError("next pointers do not form cycles", {"half_edge": h})
        cycles.append(cycle)

    def signed_area(cycle: List[int]) -> float:
        total = 0.0
        for h in cycle:
            cx, cy = frame.c[circle[h]]
            a = _arc_area(cx, cy, frame.r[circle[h]], start[h], sweep[h])
            total += a if ccw[h] else -a
        return total

    def interior_point(cycle: List[int]) -> np.ndarray:
        h = max(cycle, key=lambda g: sweep[g] * frame.r[circle[g]])
        k = circle[h]
        mid = start[h] + sweep[h] / 2.0
        unit = np.array([math.cos(mid), math.sin(mid)])
        on_arc = frame.c[k] + frame.r[k] * unit
        gaps = [abs(float(np.hypot(*(on_arc - frame.c[j]))) - frame.r[j]) for j in range(n) if j != k]
        step = 0.5 * min(gaps + [frame.r[k]])
        return frame.c[k] + (frame.r[k] - step if ccw[h] else frame.r[k] + step) * unit

    faces = []
    areas = [float(signed_area(cycle)) for cycle in cycles]
    for index, cycle in enumerate(cycles):
        p = interior_point(cycle)
        inside = np.hypot(*(frame.c - p).T) < frame.r
        discs = sum(1 << k for k in np.flatnonzero(inside))
        area = areas[index] / frame.scale ** 2
        faces.append(ArrFace(index, tuple(cycle), bool(areas[index] > 0), frame.to_world(p), int(discs), area))
    unbounded = [face for face in faces if not face.bounded]
    if len(unbounded) != 1:
        raise InternalConsistencyError(
            f"expected one unbounded face, found {len(unbounded)}", {"areas": areas}
        )

    merge_radius = eps / frame.scale
    vertices = tuple(
        ArrVertex(v, frame.to_world(positions[v]), tuple(sorted(members[v])), merge_radius)
        for v in range(len(members))
    )
    half_edges = tuple(
        HalfEdge(h, circle[h], source[h], target[h], ccw[h], float(start[h]), float(sweep[h]), twin[h], nxt[h], face_of[h])
        for h in range(len(twin))
    )
    arr = Arrangement(n, vertices, half_edges, tuple(faces), eps)
    logger.debug("arrangement n=%d V=%d E=%d F=%d", n, arr.vertex_count, arr.edge_count, arr.face_count)
    return arr


def census_via_faces(arr: Arrangement) -> DigonCensus:
    """
    Classify bounded two-edge faces: a lens if the face lies inside both supporting
    discs, a lune (a, b) if inside D_a only.
    """
    lenses, lunes = set(), set()
    for face in arr.faces:
        if not face.bounded or face.edge_count != 2:
            continue
        a, b = (arr.half_edges[h].circle for h in face.boundary)
        if a == b:
            raise InternalConsistencyError("digon bounded twice by one circle", dump_arrangement(arr))
        in_a, in_b = face.inside(a), face.inside(b)
        if in_a and in_b:
            lenses.add((min(a, b), max(a, b)))
        elif in_a != in_b:
            lunes.add((a, b) if in_a else (b, a))
    return DigonCensus(arr.n, frozenset(lenses), frozenset(lunes), ())


@dataclass(frozen=True)
class EulerVerdict:
    vertices: int
    edges: int
    faces: int
    skipped: bool = False

    @property
    def characteristic(self) -> int:
        return self.vertices - self.edges + self.faces


def euler_check(arr: Arrangement) -> EulerVerdict:
    """
    V - E + F = 2 for the connected arrangement of a pairwise intersecting family.

    A single circle (one loop edge, no vertex) is not checked.

    Raises:
        InternalConsistencyError: with the arrangement dump
    """
    verdict = EulerVerdict(arr.vertex_count, arr.edge_count, arr.face_count, skipped=arr.n < 2)
    if not verdict.skipped and verdict.characteristic != 2:
        raise InternalConsistencyError(
            f"Euler characteristic {verdict.characteristic} != 2", dump_arrangement(arr)
        )
    return verdict


def dump_arrangement(arr: Arrangement, digits: int = 9) -> Dict[str, Any]:
    """JSON-friendly description of vertices, half-edges and faces."""
    def pt(p: Tuple[float, float]) -> List[float]:
        return [round(float(p[0]), digits), round(float(p[1]), digits)]

    return {
        "n": arr.n,
        "eps": float(arr.eps),
        "counts": {"V": arr.vertex_count, "E": arr.edge_count, "F": arr.face_count},
        "vertices": [{"position": pt(v.position), "circles": [int(k) for k in v.circles]} for v in arr.vertices],
        "half_edges": [
            {"circle": h.circle, "source": h.source, "target": h.target, "ccw": bool(h.ccw),
             "twin": h.twin, "next": h.next, "face": h.face}
            for h in arr.half_edges
        ],
        "faces": [
            {"edges": f.edge_count, "bounded": bool(f.bounded), "point": pt(f.point),
             "discs": [k for k in range(arr.n) if f.inside(k)], "area": round(float(f.signed_area), digits)}
            for f in arr.faces
        ],
    }
