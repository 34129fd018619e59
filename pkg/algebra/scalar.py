"""
Exact Gaussian rationals.

Real and imaginary parts are sympy ground-type rationals (gmpy2 ``mpq`` when
available), so arithmetic never rounds.
"""

from fractions import Fraction
from typing import Any, Union

from sympy.polys.domains import QQ, QQ_I

from errors import DomainError, ParseError

MPQ = QQ.dtype
_ZERO = MPQ(0)
_ONE = MPQ(1)

Number = Union[int, Fraction, str, "Scalar"]


def to_rational(value: Any):
    """Convert an int, Fraction, rational string or ground rational to MPQ."""
    if isinstance(value, MPQ):
        return value
    if isinstance(value, bool):
        raise DomainError(f"Not an exact rational: {value!r}")
    if isinstance(value, int):
        return MPQ(value)
    if isinstance(value, Fraction):
        return MPQ(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Not an exact rational: {value!r}") from e
        return MPQ(frac.numerator, frac.denominator)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return MPQ(int(value.numerator), int(value.denominator))
    raise DomainError(f"Not an exact rational: {value!r}")


def rational_str(q) -> str:
    """Canonical "a/b" rendering ("a" when the denominator is 1)."""
    if q.denominator == 1:
        return f"{q.numerator}"
    return f"{q.numerator}/{q.denominator}"


class Scalar:
    """Exact complex number re + i·im with rational parts. Treat as immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0):
        if isinstance(re, Scalar):
            if im:
                raise DomainError("Imaginary part given twice")
            self.re, self.im = re.re, re.im
            return
        self.re = to_rational(re)
        self.im = to_rational(im)

    @classmethod
    def _make(cls, re, im) -> "Scalar":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value: Any) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls._make(to_rational(value), _ZERO)

    # Arithmetic

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except DomainError:
                return NotImplemented
        return Scalar._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except DomainError:
                return NotImplemented
        return Scalar._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Scalar._make(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except DomainError:
                return NotImplemented
        if not self.im and not other.im:
            return Scalar._make(self.re * other.re, _ZERO)
        return Scalar._make(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except DomainError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "Scalar":
        norm = self.abs2()
        if not norm:
            raise ZeroDivisionError("Scalar division by zero")
        if not self.im:
            return Scalar._make(_ONE / self.re, _ZERO)
        return Scalar._make(self.re / norm, -self.im / norm)

    def conjugate(self) -> "Scalar":
        return Scalar._make(self.re, -self.im)

    def abs2(self):
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    # Predicates and comparison

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except DomainError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # Conversions

    @classmethod
    def zero(cls) -> "Scalar":
        return cls._make(_ZERO, _ZERO)

    @classmethod
    def one(cls) -> "Scalar":
        return cls._make(_ONE, _ZERO)

    @classmethod
    def i(cls) -> "Scalar":
        return cls._make(_ZERO, _ONE)

    def to_domain(self):
        """Element of sympy's QQ_I."""
        return QQ_I(self.re, self.im)

    @classmethod
    def from_domain(cls, element) -> "Scalar":
        return cls._make(to_rational(element.x), to_rational(element.y))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_dict(self) -> dict:
        return {"re": rational_str(self.re), "im": rational_str(self.im)}

    @classmethod
    def from_dict(cls, data: Any) -> "Scalar":
        """Accept {"re": .., "im": ..}, a complex string or a number."""
        if isinstance(data, dict):
            if "re" not in data:
                raise ParseError("Scalar object needs a 're' field")
            return cls(data["re"], data.get("im", 0))
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return cls(data[0], data[1])
        if isinstance(data, str):
            return cls.parse(data)
        return cls(data)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse the ``str()`` form: "a/b", "c/di" or "a/b+c/di"."""
        s = text.replace(" ", "")
        if not s:
            raise ParseError("Empty scalar")
        if not s.endswith("i"):
            return cls(s)
        body = s[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split > 0:
            re_part, im_part = body[:split], body[split:]
        else:
            re_part, im_part = "0", body
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return cls(re_part, im_part.lstrip("+"))

    def __str__(self):
        if not self.im:
            return rational_str(self.re)
        if not self.re:
            return f"{rational_str(self.im)}i"
        sign = "-" if self.im < 0 else "+"
        return f"{rational_str(self.re)}{sign}{rational_str(abs(self.im))}i"

    def __repr__(self):
        return f"Scalar({str(self)!r})"
