"""
Extremal search: simulated annealing on lens count.

Moves act on float parameters and are screened by a float lens count. A
candidate that beats the best exact count is snapped to rationals and scored
by the exact census, so no lens count is ever claimed from floats.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.census import DigonCensus, digon_census
from src.errors import FalsificationError, FamilyValidationError, InvalidInputError
from src.generators import GenConfig, gen_random
from src.geometry import Circle, Family, validate_family
from src.schemas import FamilyFile, TraceRecord
from src.settings import settings

logger = logging.getLogger(__name__)


class SearchConfig(BaseModel):
    """Annealing schedule; unset fields fall back to settings."""
    n: int = Field(ge=2)
    seed: int = 0
    iters: int = Field(default=2000, ge=0)
    initial_temperature: float = Field(default_factory=lambda: settings.SEARCH_INITIAL_TEMPERATURE, gt=0)
    cooling: float = Field(default_factory=lambda: settings.SEARCH_COOLING, gt=0, le=1)
    restart_every: int = Field(default_factory=lambda: settings.SEARCH_RESTART_EVERY, ge=0)
    move_scale: float = Field(default_factory=lambda: settings.SEARCH_MOVE_SCALE, gt=0)
    tangency_rate: float = Field(default_factory=lambda: settings.SEARCH_TANGENCY_RATE, ge=0, le=1)
    jump_rate: float = Field(default_factory=lambda: settings.SEARCH_JUMP_RATE, ge=0, le=1)
    snap_denominator: int = Field(default_factory=lambda: settings.SEARCH_SNAP_DENOMINATOR, ge=1)
    trace_every: int = Field(default_factory=lambda: settings.SEARCH_TRACE_EVERY, ge=1)
    stop_at_bound: bool = True


@dataclass
class SearchState:
    params: np.ndarray  # rows (cx, cy, r)
    score: int  # float-screened lens count of params
    temperature: float
    iteration: int
    rng: np.random.Generator


@dataclass
class SearchResult:
    family: Family
    census: DigonCensus
    initial: Family
    trace: List[TraceRecord] = field(default_factory=list)
    restarts: int = 0
    exact_evaluations: int = 0

    @property
    def lens_count(self) -> int:
        return self.census.lens_count

    @property
    def target(self) -> int:
        return 2 * self.family.n - 2


def _params(f: Family) -> np.ndarray:
    return np.array([[float(c.center.x), float(c.center.y), math.sqrt(float(c.r2))] for c in f])


def _snap(x: float, denominator: int) -> Fraction:
    return Fraction(round(x * denominator), denominator)


def _rationalize(params: np.ndarray, denominator: int) -> Optional[Family]:
    """Snap parameters to rationals; None when the snapped family is not valid."""
    circles = []
    for cx, cy, r in params:
        radius = _snap(r, denominator)
        if radius <= 0:
            return None
        circles.append(Circle.from_radius(_snap(cx, denominator), _snap(cy, denominator), radius))
    try:
        return validate_family(circles)
    except FamilyValidationError:
        return None


def _window(params: np.ndarray, k: int) -> Tuple[float, float]:
    """Open interval of radii for circle k that cross every other circle."""
    others = np.delete(np.arange(len(params)), k)
    d = np.hypot(*(params[others, :2] - params[k, :2]).T)
    r = params[others, 2]
    return float(np.max(np.abs(d - r))), float(np.min(d + r))


def _repair_radius(params: np.ndarray, k: int) -> bool:
    """Rescale r_k into the window where it crosses every other circle; False if the window is empty."""
    lo, hi = _window(params, k)
    if lo >= hi:
        return False
    if not lo < params[k, 2] < hi:
        params[k, 2] = (lo + hi) / 2.0
    return True


def _crosses_all(params: np.ndarray) -> bool:
    for i, j in itertools.combinations(range(len(params)), 2):
        d = math.hypot(params[i, 0] - params[j, 0], params[i, 1] - params[j, 1])
        if not abs(params[i, 2] - params[j, 2]) < d < params[i, 2] + params[j, 2]:
            return False
    return True


def _crossing_points(base: np.ndarray, other: np.ndarray) -> np.ndarray:
    d = math.hypot(other[0] - base[0], other[1] - base[1])
    ux, uy = (other[0] - base[0]) / d, (other[1] - base[1]) / d
    a = ((d - other[2]) * (d + other[2]) + base[2] * base[2]) / (2.0 * d)
    h = math.sqrt(max(base[2] * base[2] - a * a, 0.0))
    mx, my = base[0] + a * ux, base[1] + a * uy
    return np.array([[mx - h * uy, my + h * ux], [mx + h * uy, my - h * ux]])


def _in_disc(points: np.ndarray, c: np.ndarray) -> bool:
    return bool(np.any(np.hypot(points[:, 0] - c[0], points[:, 1] - c[1]) - c[2] <= 0.0))


def _float_lens_count(params: np.ndarray) -> int:
    """
    Lens count in floating point for a pairwise crossing family.

    The lens of i and j is blocked by k when circle k meets the closed region
    D_i & D_j: either a crossing of k with one circle lies in the other disc,
    or circle k lies inside the region (tested at its rightmost point).
    """
    n = len(params)
    cross: Dict[Tuple[int, int], np.ndarray] = {}
    for i, j in itertools.combinations(range(n), 2):
        small, large = (i, j) if params[i, 2] <= params[j, 2] else (j, i)
        cross[i, j] = cross[j, i] = _crossing_points(params[small], params[large])
    count = 0
    for i, j in itertools.combinations(range(n), 2):
        blocked = False
        for k in range(n):
            if k in (i, j):
                continue
            east = np.array([[params[k, 0] + params[k, 2], params[k, 1]]])
            if (_in_disc(cross[k, i], params[j]) or _in_disc(cross[k, j], params[i])
                    or (_in_disc(east, params[i]) and _in_disc(east, params[j]))):
                blocked = True
                break
        count += not blocked
    return count


def _wedge_params(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw a family shaped like the tight construction.

    Two large circles pass through the origin with centers on the rays at
    angle alpha from the y axis; the small circles sit on the positive x axis,
    homothetic about the origin with tangent half-angle slightly above alpha.
    Often, but not always, every small circle forms a lens with both large ones.
    """
    t = rng.uniform(0.3, 0.7)
    sin_a, cos_a = 2 * t / (1 + t * t), (1 - t * t) / (1 + t * t)
    m = n - 2
    abscissas = 1.0 + np.concatenate([[0.0], np.cumsum(rng.uniform(0.15, 0.45, size=max(m - 1, 0)))])[:m]
    delta = cos_a * rng.uniform(0.02, 0.10)
    r0 = math.sqrt(sin_a * sin_a + delta * delta)
    if m:
        large = abscissas[-1] * (1 - r0 * r0) / (2 * (r0 - sin_a)) * rng.uniform(0.8, 5.0)
    else:
        large = rng.uniform(1.0, 5.0)
    rows = [(-large * sin_a, large * cos_a, large), (-large * sin_a, -large * cos_a, large)]
    rows += [(s, 0.0, r0 * s) for s in abscissas]
    return np.array(rows)


def _tangency_move(params: np.ndarray, rng: np.random.Generator) -> Optional[np.ndarray]:
    """Bring circle j just past external tangency with circle i."""
    i, j = (int(v) for v in rng.choice(len(params), size=2, replace=False))
    candidate = params.copy()
    d = math.hypot(params[i, 0] - params[j, 0], params[i, 1] - params[j, 1])
    radius = d - params[i, 2] + rng.uniform(0.0, 0.05) * min(params[i, 2], params[j, 2])
    lo, hi = _window(candidate, j)
    if not lo < radius < hi:
        return None
    candidate[j, 2] = radius
    return candidate


def _jitter_move(params: np.ndarray, rng: np.random.Generator, scale: float) -> Optional[np.ndarray]:
    k = int(rng.integers(len(params)))
    candidate = params.copy()
    step = scale * float(np.mean(candidate[:, 2]))
    candidate[k, :2] += rng.normal(0.0, step, size=2)
    candidate[k, 2] *= math.exp(rng.normal(0.0, scale))
    return candidate if _repair_radius(candidate, k) else None


def _score(f: Family, n: int) -> DigonCensus:
    census = digon_census(f, threads=1)
    if census.lens_count > 2 * n - 2:
        raise FalsificationError(
            "lenses", f"search found {census.lens_count} lenses for n={n}",
            {"family": FamilyFile.from_family(f).model_dump(exclude_none=True)},
        )
    return census


def extremal_search(cfg: SearchConfig, initial: Optional[Family] = None) -> SearchResult:
    """
    Anneal towards a family with many lenses.

    Each iteration proposes one of three moves: a jump to a fresh wedge-shaped
    family (jump_rate), a radius change that makes two circles nearly tangent
    (tangency_rate), or a Gaussian step of one circle scaled by the temperature.
    Acceptance uses the float lens count. Whenever that count beats the best
    exact count, the candidate is snapped and scored exactly; only exact counts
    become the result. Restarts return to the best family found so far.
    Deterministic given the config.

    Raises:
        FalsificationError: a candidate with more than 2n - 2 lenses
    """
    n = cfg.n
    if initial is None:
        initial = gen_random(GenConfig(n=n, seed=cfg.seed))
    elif initial.n != n:
        raise InvalidInputError(f"initial family has {initial.n} circles, expected {n}")
    census = _score(initial, n)
    params = _params(initial)
    state = SearchState(params, _float_lens_count(params), cfg.initial_temperature, 0, np.random.default_rng(cfg.seed))
    rng = state.rng
    result = SearchResult(initial, census, initial, exact_evaluations=1)
    best_params = state.params.copy()
    target = 2 * n - 2

    for it in range(1, cfg.iters + 1):
        if cfg.stop_at_bound and result.lens_count == target:
            logger.debug("bound %d reached at iteration %d", target, it - 1)
            break
        state.iteration = it
        if cfg.restart_every and it % cfg.restart_every == 0:
            state.params = best_params.copy()
            state.score = _float_lens_count(state.params)
            state.temperature = cfg.initial_temperature
            result.restarts += 1
            logger.debug("restart %d at iteration %d", result.restarts, it)

        u = rng.random()
        if u < cfg.jump_rate:
            candidate = _wedge_params(n, rng)
        elif u < cfg.jump_rate + cfg.tangency_rate:
            candidate = _tangency_move(state.params, rng)
        else:
            candidate = _jitter_move(state.params, rng, cfg.move_scale * state.temperature)

        accepted = False
        if candidate is not None and _crosses_all(candidate):
            score = _float_lens_count(candidate)
            delta = score - state.score
            if delta >= 0 or rng.random() < math.exp(delta / max(state.temperature, 1e-12)):
                accepted = True
                state.params, state.score = candidate, score
            if score > result.lens_count:
                family = _rationalize(candidate, cfg.snap_denominator)
                if family is not None:
                    exact = _score(family, n)
                    result.exact_evaluations += 1
                    if exact.lens_count > result.lens_count:
                        result.family, result.census = family, exact
                        best_params = candidate.copy()
                        logger.debug("iteration %d: %d lenses (exact)", it, exact.lens_count)

        if it % cfg.trace_every == 0:
            result.trace.append(TraceRecord(
                iteration=it, temperature=state.temperature, lens_count=state.score, accepted=accepted,
            ))
        state.temperature *= cfg.cooling

    logger.info("search n=%d seed=%d best=%d target=%d exact_evaluations=%d",
                n, cfg.seed, result.lens_count, target, result.exact_evaluations)
    return result
