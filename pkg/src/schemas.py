"""Pydantic schemas for family files, reports and traces."""
import json
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ValidationError, model_validator

from src.errors import InvalidInputError
from src.geometry import Circle, Family, Point, validate_family
from src.kernel import format_rational, parse_rational

Number = Union[str, int]  # "p/q", integer or exact decimal; floats are refused


class CircleIn(BaseModel):
    """One circle; exactly one of r (radius) or r2 (squared radius)."""
    cx: Number
    cy: Number
    r: Optional[Number] = None
    r2: Optional[Number] = None

    @model_validator(mode="after")
    def check_radius(self) -> "CircleIn":
        if (self.r is None) == (self.r2 is None):
            raise ValueError("give exactly one of r or r2")
        return self

    def to_circle(self) -> Circle:
        center = Point(parse_rational(self.cx), parse_rational(self.cy))
        if self.r is not None:
            return Circle.from_radius(center.x, center.y, parse_rational(self.r))
        return Circle(center, parse_rational(self.r2))

    @classmethod
    def from_circle(cls, c: Circle) -> "CircleIn":
        radius = c.radius
        cx, cy = format_rational(c.center.x), format_rational(c.center.y)
        if radius is not None:
            return cls(cx=cx, cy=cy, r=format_rational(radius))
        return cls(cx=cx, cy=cy, r2=format_rational(c.r2))


class FamilyFile(BaseModel):
    """JSON family file."""
    circles: List[CircleIn]

    def to_family(self) -> Family:
        return validate_family(c.to_circle() for c in self.circles)

    @classmethod
    def from_family(cls, f: Family) -> "FamilyFile":
        return cls(circles=[CircleIn.from_circle(c) for c in f])


def parse_family(text: str) -> Family:
    """
    Parse and validate a family file.

    Raises:
        InvalidInputError: malformed JSON, bad numbers or a schema violation
        FamilyValidationError: a non-intersecting pair
    """
    try:
        doc = FamilyFile.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidInputError(f"malformed family file: {e}")
    return doc.to_family()


def dump_family(f: Family) -> str:
    return FamilyFile.from_family(f).model_dump_json(indent=2, exclude_none=True)


class BoundsOut(BaseModel):
    lens_max: int
    lens_ok: bool
    lune_max: Optional[int]
    lune_ok: bool
    vacuous: bool


class TheoremVerdicts(BaseModel):
    """Per-theorem verdict: "pass", "fail", "not_applicable", "vacuous" or "skipped"."""
    lenses: str = "skipped"
    lunes: str = "skipped"
    main: str = "skipped"
    klv: str = "skipped"


class OracleAgreement(BaseModel):
    """Exact census against the float arrangement; agreement is None when the oracle declined."""
    engine: str
    agreement: Optional[bool]
    euler: Optional[int] = None
    euler_skipped: bool = False
    note: Optional[str] = None


class TangentPairOut(BaseModel):
    i: int
    j: int
    point: List[float]


class CensusReport(BaseModel):
    """Census command output; counts always match the pair lists."""
    n: int
    engine: str = "exact"
    lens_pairs: List[List[int]]
    lune_pairs: List[List[int]]
    tangent_pairs: List[TangentPairOut]
    lens_count: int
    lune_count: int
    lune_edge_count: int  # unordered pairs with a lune; the lune bound applies here
    bounds: BoundsOut
    avoiding_pairs: List[List[List[int]]]
    theorem_verdicts: TheoremVerdicts
    oracle: Optional[OracleAgreement] = None


class ChargeOut(BaseModel):
    e: List[int]
    f: List[int]
    removed: List[int]
    blue: List[int]


class VerifyReport(BaseModel):
    n: int
    theorem_verdicts: TheoremVerdicts
    lens_count: int
    lune_count: int
    avoiding_pairs: int
    charges: List[ChargeOut] = []
    resolved_edges: Optional[int] = None
    perturbed: Optional[bool] = None


class TraceRecord(BaseModel):
    """One search iteration."""
    iteration: int
    temperature: float
    lens_count: int
    accepted: bool


class SearchReport(BaseModel):
    n: int
    seed: int
    iters: int
    lens_count: int
    target: int
    reached: bool
    family: FamilyFile


class InvertResult(BaseModel):
    invariance_contract: bool
    family: FamilyFile


class ErrorOut(BaseModel):
    error: str
    message: str
    exit_code: int
    details: Dict[str, Any] = {}
