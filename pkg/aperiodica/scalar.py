"""
Exact numbers of the field Q(sqrt5).

Every coordinate, length and density in the package is a `QuadNum`: a pair of
rationals `(a, b)` standing for `a + b*sqrt5`. Ordering is decided by exact sign
analysis on the rational parts, never by floating point.
"""
import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Any, Callable, Iterator, Union

from typing_extensions import Self, TypeAlias

from aperiodica.errors import LiteralParseError

Rational: TypeAlias = Union[int, Fraction]
ScalarLike: TypeAlias = Union["QuadNum", int, Fraction, str, float]

SQRT5_FLOAT = math.sqrt(5.0)


def _sgn(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@total_ordering
class QuadNum:
    __slots__ = ("a", "b")

    a: Fraction
    b: Fraction

    def __init__(self, a: Rational = 0, b: Rational = 0) -> None:
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("QuadNum is immutable")

    def __reduce__(self) -> tuple[type, tuple[Fraction, Fraction]]:
        return QuadNum, (self.a, self.b)

    @classmethod
    def of(cls, value: ScalarLike) -> "QuadNum":
        if isinstance(value, QuadNum):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise LiteralParseError(f"not a finite number: {value}")
            return cls(Fraction(repr(float(value))))
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot convert {type(value).__name__} to QuadNum")

    @classmethod
    def __get_validators__(cls) -> Iterator[Callable[..., "QuadNum"]]:
        yield cls.of

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        sa, sb = _sgn(self.a), _sgn(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger of a^2 and 5b^2 wins
        return sa * _sgn(self.a * self.a - 5 * self.b * self.b)

    def conjugate(self) -> "QuadNum":
        return QuadNum(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * SQRT5_FLOAT

    def __repr__(self) -> str:
        return f'QuadNum("{format_scalar(self)}")'

    def __str__(self) -> str:
        return format_scalar(self)

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadNum):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __lt__(self, other: ScalarLike) -> bool:
        if not isinstance(other, (QuadNum, int, Fraction)):
            return NotImplemented
        return (self - other).sign() < 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __neg__(self) -> "QuadNum":
        return QuadNum(-self.a, -self.b)

    def __pos__(self) -> Self:
        return self

    def __abs__(self) -> "QuadNum":
        return -self if self.sign() < 0 else self

    def __add__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadNum(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadNum(self.a - o.a, self.b - o.b)

    def __rsub__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if o.b == 0:
            return QuadNum(self.a * o.a, self.b * o.a)
        return QuadNum(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("QuadNum division by zero")
        if o.b == 0:
            return QuadNum(self.a / o.a, self.b / o.a)
        n = o.norm()
        return QuadNum((self.a * o.a - 5 * self.b * o.b) / n, (self.b * o.a - self.a * o.b) / n)

    def __rtruediv__(self, other: ScalarLike) -> "QuadNum":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int) -> "QuadNum":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return QuadNum(1) / self**-exponent
        result, base = QuadNum(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        f = math.floor(float(self))
        while self < f:
            f -= 1
        while self >= f + 1:
            f += 1
        return f

    def __ceil__(self) -> int:
        return -math.floor(-self)


def _coerce(value: object) -> "QuadNum | None":
    if isinstance(value, QuadNum):
        return value
    if isinstance(value, (int, Fraction)):
        return QuadNum(value)
    return None


ZERO = QuadNum(0)
ONE = QuadNum(1)
SQRT5 = QuadNum(0, 1)
PHI = QuadNum(Fraction(1, 2), Fraction(1, 2))
PHI_STAR = QuadNum(Fraction(1, 2), Fraction(-1, 2))


_RATIONAL = r"\d+(?:\.\d*)?(?:/\d+)?|\.\d+"
_LITERAL = re.compile(
    rf"^(?P<rational>[+-]?(?:{_RATIONAL}))?"
    rf"(?:(?P<sign>[+-])?(?P<coef>{_RATIONAL})?\*?sqrt5)?$"
)


def _fraction(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(num) / Fraction(den)
    return Fraction(text)


def parse_scalar(text: str) -> QuadNum:
    """Parse an exact literal such as `3`, `-1/2`, `0.25`, `1/2+1/2*sqrt5`, `sqrt5`, `phi`."""
    source = text
    text = text.strip().replace(" ", "")
    if text in ("phi", "+phi"):
        return PHI
    if text == "-phi":
        return -PHI
    if not text:
        raise LiteralParseError(f"empty scalar literal: {source!r}")
    match = _LITERAL.match(text)
    if match is None or match.group(0) == "" or text in ("+", "-"):
        raise LiteralParseError(f"invalid scalar literal: {source!r}")
    rational, sign, coef = match.group("rational"), match.group("sign"), match.group("coef")
    try:
        if not text.endswith("sqrt5"):
            return QuadNum(_fraction(rational))
        if sign is None:
            # a bare sqrt5 term: `sqrt5`, `2*sqrt5`, `-1/2*sqrt5`
            return QuadNum(0, _fraction(rational) if rational else 1)
        b = _fraction(coef) if coef else Fraction(1)
        return QuadNum(_fraction(rational) if rational else 0, -b if sign == "-" else b)
    except (ZeroDivisionError, ValueError) as e:
        raise LiteralParseError(f"invalid scalar literal: {source!r}") from e


def format_scalar(x: QuadNum) -> str:
    """Exact literal `p/q` or `p/q+r/s*sqrt5`, the inverse of `parse_scalar`."""
    if x.b == 0:
        return str(x.a)
    sign = "-" if x.b < 0 else "+"
    return f"{x.a}{sign}{abs(x.b)}*sqrt5"


def as_scalar(value: ScalarLike) -> QuadNum:
    return QuadNum.of(value)
