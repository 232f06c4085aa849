"""Deterministic SVG rendering of a family, its digons and its centers graph."""
import logging
import math
from typing import Iterable, List, Optional, Tuple

from src.census import CentersGraph, DigonCensus
from src.errors import InvalidInputError
from src.geometry import Family, intersection_points
from src.graphs import BLUE, RED
from src.settings import settings

logger = logging.getLogger(__name__)

HIGHLIGHTS = ("lenses", "lunes", "graph")
EDGE_COLORS = {RED: "#d62728", BLUE: "#1f77b4"}
DIGON_FILL = "#f4a261"


class Printer:
    """Collects SVG elements; y is flipped so that the picture reads in math orientation."""

    def __init__(self, digits: int):
        self.digits = digits
        self._output: List[str] = []

    def num(self, x: float) -> str:
        text = f"{x:.{self.digits}f}"
        return text[1:] if text.startswith("-") and float(text) == 0 else text

    def xy(self, x: float, y: float) -> str:
        return f"{self.num(x)} {self.num(-y)}"

    def print_output(self, output: str) -> None:
        self._output.append(output)

    def print_circle(self, x: float, y: float, r: float, width: float) -> None:
        self.print_output(
            f'<circle cx="{self.num(x)}" cy="{self.num(-y)}" r="{self.num(r)}" '
            f'fill="none" stroke="black" stroke-width="{self.num(width)}"/>'
        )

    def print_line(self, p: Tuple[float, float], q: Tuple[float, float], color: str, width: float) -> None:
        self.print_output(
            f'<line x1="{self.num(p[0])}" y1="{self.num(-p[1])}" x2="{self.num(q[0])}" y2="{self.num(-q[1])}" '
            f'stroke="{color}" stroke-width="{self.num(width)}"/>'
        )

    def print_path(self, d: str) -> None:
        self.print_output(f'<path d="{d}" fill="{DIGON_FILL}" fill-opacity="0.6" stroke="none"/>')

    def render(self, view_box: Tuple[float, float, float, float]) -> str:
        x, y, w, h = (self.num(v) for v in view_box)
        body = "\n".join(f"  {line}" for line in self._output)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x} {y} {w} {h}">\n'
            f"{body}\n</svg>\n"
        )


def _circle_floats(f: Family) -> List[Tuple[float, float, float]]:
    return [c.to_float() for c in f]


def _arc(
    printer: Printer, circle: Tuple[float, float, float], a: Tuple[float, float], b: Tuple[float, float],
    other: Tuple[float, float, float], inside_other: bool,
) -> str:
    """SVG arc command along `circle` from a to b, taking the piece inside (or outside) `other`."""
    cx, cy, r = circle
    t1 = math.atan2(a[1] - cy, a[0] - cx)
    t2 = math.atan2(b[1] - cy, b[0] - cx)
    span = (t2 - t1) % (2 * math.pi)
    mid = t1 + span / 2
    mx, my = cx + r * math.cos(mid), cy + r * math.sin(mid)
    ox, oy, orad = other
    if (math.hypot(mx - ox, my - oy) < orad) != inside_other:
        span, sweep = 2 * math.pi - span, 0  # clockwise in math orientation
    else:
        sweep = 1
    large = 1 if span > math.pi else 0
    return f"A {printer.num(r)} {printer.num(r)} 0 {large} {sweep} {printer.xy(*b)}"


def _digon_path(printer: Printer, f: Family, i: int, j: int, lens: bool) -> str:
    """Closed path of the lens D_i & D_j, or of the lune D_i minus D_j."""
    circles = _circle_floats(f)
    v1, v2 = (p.to_float() for p in intersection_points(f[i], f[j], i, j))
    first = _arc(printer, circles[i], v1, v2, circles[j], inside_other=lens)
    second = _arc(printer, circles[j], v2, v1, circles[i], inside_other=True)
    return f"M {printer.xy(*v1)} {first} {second} Z"


def view_box(f: Family, margin: float) -> Tuple[float, float, float, float]:
    """Bounding box of the discs plus `margin` times its larger side, in flipped-y coordinates."""
    circles = _circle_floats(f)
    lo_x = min(cx - r for cx, _, r in circles)
    hi_x = max(cx + r for cx, _, r in circles)
    lo_y = min(cy - r for _, cy, r in circles)
    hi_y = max(cy + r for _, cy, r in circles)
    pad = margin * max(hi_x - lo_x, hi_y - lo_y)
    return lo_x - pad, -hi_y - pad, hi_x - lo_x + 2 * pad, hi_y - lo_y + 2 * pad


def render_svg(
    f: Family, census: DigonCensus, graph: Optional[CentersGraph] = None,
    highlight: Iterable[str] = ("lenses",), digits: Optional[int] = None, margin: Optional[float] = None,
) -> str:
    """
    SVG text for the family: filled digons first, then circles, then graph edges.

    Raises:
        InvalidInputError: unknown highlight, or "graph" without a graph
    """
    highlight = tuple(highlight)
    unknown = set(highlight) - set(HIGHLIGHTS)
    if unknown:
        raise InvalidInputError(f"unknown highlight {sorted(unknown)}; choose from {HIGHLIGHTS}")
    if "graph" in highlight and graph is None:
        raise InvalidInputError("graph highlight needs a centers graph")
    digits = settings.SVG_DIGITS if digits is None else digits
    margin = settings.SVG_MARGIN if margin is None else margin

    printer = Printer(digits)
    box = view_box(f, margin)
    width = 0.004 * max(box[2], box[3])
    if "lenses" in highlight:
        for i, j in sorted(census.lens_pairs):
            printer.print_path(_digon_path(printer, f, i, j, lens=True))
    if "lunes" in highlight:
        for i, j in sorted(census.lune_pairs):
            printer.print_path(_digon_path(printer, f, i, j, lens=False))
    for cx, cy, r in _circle_floats(f):
        printer.print_circle(cx, cy, r, width)
    if "graph" in highlight:
        centers = [c.to_float() for c in graph.vertices]
        for e in sorted(graph.edges):
            printer.print_line(centers[e.i], centers[e.j], EDGE_COLORS.get(e.color, "black"), 2 * width)
    logger.debug("rendered %d circles, highlight=%s", f.n, highlight)
    return printer.render(box)
