"""Exact number kernel: rationals, quadratic numbers a + b*sqrt(c), filtered signs."""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from src.errors import InvalidInputError

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[Fraction, int]


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """
    Parse an exact rational from "p/q", an integer, or an exact decimal.

    "1.25" parses to 5/4; no binary floating point is involved.

    Raises:
        InvalidInputError: if the text is not a finite rational
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise InvalidInputError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not text.strip():
        raise InvalidInputError(f"not a rational: {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"not a rational: {text!r} ({e})")


def format_rational(q: Fraction) -> str:
    """Serialize a rational as "p/q" or "p"; parse_rational inverts it exactly."""
    return str(Fraction(q))


def _sign(q: RationalLike) -> int:
    return (q > 0) - (q < 0)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        raise InvalidInputError(f"negative radicand {q}")
    n, d = q.numerator, q.denominator
    s, t = math.isqrt(n), math.isqrt(d)
    if s * s == n and t * t == d:
        return Fraction(s, t)
    return None


@dataclass(frozen=True, eq=False)
class QuadraticNumber:
    """
    Exact real value a + b*sqrt(c) with rational a, b and rational c >= 0.

    Equality and ordering are by value (radicands may differ), so instances
    are not hashable.
    """
    a: Fraction
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c < 0:
            raise InvalidInputError(f"negative radicand {self.c}")

    @classmethod
    def make(cls, a: RationalLike, b: RationalLike = 0, c: RationalLike = 0) -> "QuadraticNumber":
        """Build a canonical value: rational square roots are folded into a."""
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        if b == 0 or c == 0:
            return cls(a)
        root = rational_sqrt(c)
        if root is not None:
            return cls(a + b * root)
        return cls(a, b, c)

    @classmethod
    def sqrt_of(cls, q: RationalLike) -> "QuadraticNumber":
        """sqrt(q) for rational q >= 0."""
        return cls.make(0, 1, q)

    @property
    def is_rational(self) -> bool:
        return self.b == 0 or self.c == 0 or rational_sqrt(self.c) is not None

    def rational_value(self) -> Optional[Fraction]:
        """The exact value when it is rational, else None."""
        if self.b == 0 or self.c == 0:
            return self.a
        root = rational_sqrt(self.c)
        if root is None:
            return None
        return self.a + self.b * root

    def to_float(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(float(self.c))

    def _radicand_with(self, other: "QuadraticNumber") -> Fraction:
        if self.b == 0 or self.c == 0:
            return other.c if other.b != 0 else Fraction(0)
        if other.b == 0 or other.c == 0 or other.c == self.c:
            return self.c
        raise InvalidInputError(f"mixed radicands {self.c} and {other.c}")

    def __neg__(self) -> "QuadraticNumber":
        return QuadraticNumber(-self.a, -self.b, self.c)

    def __add__(self, other) -> "QuadraticNumber":
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(self.a + other, self.b, self.c)
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        c = self._radicand_with(other)
        b = (self.b if self.c else 0) + (other.b if other.c else 0)
        return QuadraticNumber(self.a + other.a, b, c if b else 0)

    __radd__ = __add__

    def __sub__(self, other) -> "QuadraticNumber":
        if isinstance(other, (int, Fraction)):
            return self + (-Fraction(other))
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QuadraticNumber":
        return (-self) + other

    def __mul__(self, other) -> "QuadraticNumber":
        if isinstance(other, (int, Fraction)):
            return QuadraticNumber(self.a * other, self.b * other, self.c)
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        c = self._radicand_with(other)
        b1 = self.b if self.c else Fraction(0)
        b2 = other.b if other.c else Fraction(0)
        return QuadraticNumber(
            self.a * other.a + b1 * b2 * c,
            self.a * b2 + other.a * b1,
            c,
        )

    __rmul__ = __mul__

    def square(self) -> "QuadraticNumber":
        return self * self

    # Value comparisons
    def _cmp(self, other) -> int:
        if isinstance(other, (int, Fraction)):
            other = QuadraticNumber(other)
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        return qn_compare(self, other)

    def __eq__(self, other):
        result = self._cmp(other)
        return result if result is NotImplemented else result == 0

    def __lt__(self, other):
        result = self._cmp(other)
        return result if result is NotImplemented else result < 0

    def __le__(self, other):
        result = self._cmp(other)
        return result if result is NotImplemented else result <= 0

    def __gt__(self, other):
        result = self._cmp(other)
        return result if result is NotImplemented else result > 0

    def __ge__(self, other):
        result = self._cmp(other)
        return result if result is NotImplemented else result >= 0

    def __repr__(self) -> str:
        if self.b == 0 or self.c == 0:
            return f"QN({self.a})"
        return f"QN({self.a} + {self.b}*sqrt({self.c}))"


def qn_sign(x: QuadraticNumber) -> int:
    """
    Exact sign of a + b*sqrt(c).

    Compares a**2 with b**2 * c when the two terms have opposite signs.
    """
    if x.c < 0:
        raise InvalidInputError(f"negative radicand {x.c}")
    sa = _sign(x.a)
    if x.b == 0 or x.c == 0:
        return sa
    sb = _sign(x.b)
    if sa == 0 or sa == sb:
        return sb if sa == 0 else sa
    diff = x.a * x.a - x.b * x.b * x.c
    if diff > 0:
        return sa
    if diff < 0:
        return sb
    return 0


def qn_compare(x: QuadraticNumber, y: QuadraticNumber) -> int:
    """
    Exact ordering of two quadratic numbers with possibly different radicands.

    Returns -1, 0 or +1 like a classic cmp. At most two squarings are used.
    """
    xb = x.b if x.c else Fraction(0)
    yb = y.b if y.c else Fraction(0)
    if yb == 0 or xb == 0 or x.c == y.c:
        radicand = x.c if xb else y.c
        return qn_sign(QuadraticNumber(x.a - y.a, xb - yb, radicand))
    # u = (a - a') + b*sqrt(c) against v = b'*sqrt(c')
    u = QuadraticNumber(x.a - y.a, xb, x.c)
    su = qn_sign(u)
    sv = _sign(yb)
    if su != sv:
        return 1 if su > sv else -1
    # same sign: compare squares, u^2 = A + B*sqrt(c), v^2 = b'^2 c'
    da = x.a - y.a
    squares = qn_sign(QuadraticNumber(da * da + xb * xb * x.c - yb * yb * y.c, 2 * da * xb, x.c))
    return squares if su > 0 else -squares


@dataclass(frozen=True)
class FloatInterval:
    """Closed float interval [lo, hi] guaranteed to contain an exact value."""
    lo: float
    hi: float

    @classmethod
    def from_rational(cls, q: Fraction) -> "FloatInterval":
        f = float(q)  # correctly rounded, so one ulp each way contains q
        if f == q:
            return cls(f, f)
        return cls(math.nextafter(f, -math.inf), math.nextafter(f, math.inf))

    def __add__(self, other: "FloatInterval") -> "FloatInterval":
        return FloatInterval(
            math.nextafter(self.lo + other.lo, -math.inf),
            math.nextafter(self.hi + other.hi, math.inf),
        )

    def __mul__(self, other: "FloatInterval") -> "FloatInterval":
        products = (
            self.lo * other.lo, self.lo * other.hi,
            self.hi * other.lo, self.hi * other.hi,
        )
        return FloatInterval(
            math.nextafter(min(products), -math.inf),
            math.nextafter(max(products), math.inf),
        )

    def sqrt(self) -> "FloatInterval":
        lo = max(self.lo, 0.0)
        return FloatInterval(
            max(math.nextafter(math.sqrt(lo), -math.inf), 0.0),
            math.nextafter(math.sqrt(max(self.hi, 0.0)), math.inf),
        )

    def sign(self) -> Optional[int]:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return None


def interval_sign(x: QuadraticNumber) -> Optional[int]:
    """
    Certified float stage of filtered_sign.

    Returns the sign when the enclosing interval excludes zero, else None.
    """
    if x.b == 0 or x.c == 0:
        return _sign(x.a)
    try:
        value = (
            FloatInterval.from_rational(x.a)
            + FloatInterval.from_rational(x.b) * FloatInterval.from_rational(x.c).sqrt()
        )
    except OverflowError:
        return None
    if not (math.isfinite(value.lo) and math.isfinite(value.hi)):
        return None
    return value.sign()


def filtered_sign(x: QuadraticNumber) -> int:
    """Sign of x: interval filter first, exact qn_sign only if the interval straddles 0."""
    if x.c < 0:
        raise InvalidInputError(f"negative radicand {x.c}")
    s = interval_sign(x)
    if s is not None:
        return s
    logger.debug("interval filter inconclusive for %r, using exact sign", x)
    return qn_sign(x)


def rational_approximation(x: QuadraticNumber, tolerance: Fraction) -> Fraction:
    """A rational within `tolerance` of x (sqrt(c) approximated by scaled isqrt)."""
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise InvalidInputError("tolerance must be positive")
    exact = x.rational_value()
    if exact is not None:
        return exact
    bits = 0
    while abs(x.b) > tolerance * (1 << bits):
        bits += 1
    scaled = x.c * (1 << (2 * bits))
    root = Fraction(math.isqrt(scaled.numerator // scaled.denominator), 1 << bits)
    return x.a + x.b * root
