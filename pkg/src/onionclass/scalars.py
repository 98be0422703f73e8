"""Scalar fields used for amplitude arithmetic.

Every quantity in this package lives in one of two fields: exact Gaussian
rationals (complex numbers with arbitrary-precision rational components,
closed under +, -, *, /) or ordinary complex floats.  Exact arithmetic never
rounds; float arithmetic carries a relative tolerance that all zero tests
respect.  A quadratic extension field (values a + b*sqrt(d) over the
Gaussian rationals) supports the one place where a square root is
unavoidable, the splitting step of the 3-qubit canonical form.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

DEFAULT_TOL = 1e-9


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


class GaussianRational:
    """Exact complex scalar re + im*i with rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n2 = o.re * o.re + o.im * o.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n2,
            (self.im * o.re - self.re * o.im) / n2,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return GaussianRational(1) / self ** (-exponent)
        result = GaussianRational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.sqrt(self.abs_squared())

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{_frac_str(self.re)}{sign}{_frac_str(abs(self.im))}i"


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


class QuadExt:
    """Scalar a + b*sqrt(rad) over the Gaussian rationals.

    The radicand is fixed per value and must not be a perfect square in the
    base field, which keeps division well defined (a^2 - b^2*rad can then
    vanish only at zero).
    """

    __slots__ = ("a", "b", "rad")

    def __init__(self, a, b, rad: GaussianRational):
        self.a = a if isinstance(a, GaussianRational) else GaussianRational(a)
        self.b = b if isinstance(b, GaussianRational) else GaussianRational(b)
        self.rad = rad

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.rad != self.rad:
                raise ValueError("mixed radicands in quadratic extension arithmetic")
            return other
        if isinstance(other, (GaussianRational, int, Fraction)):
            return QuadExt(other, 0, self.rad)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.rad)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.rad)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.b * o.b * self.rad,
            self.a * o.b + self.b * o.a,
            self.rad,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        denom = o.a * o.a - o.b * o.b * self.rad
        if not denom:
            raise ZeroDivisionError("division by zero in quadratic extension")
        num = self * QuadExt(o.a, -o.b, self.rad)
        return QuadExt(num.a / denom, num.b / denom, self.rad)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.rad)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.rad))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def simplified(self):
        """Collapse back to the base field when the extension part is zero."""
        return self.a if not self.b else self

    def __complex__(self):
        return complex(self.a) + complex(self.b) * cmath.sqrt(complex(self.rad))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self):
        return f"QuadExt({self.a!r}, {self.b!r}, {self.rad!r})"

    def __str__(self):
        return f"({self.a})+({self.b})*sqrt({self.rad})"


def is_exact(value) -> bool:
    return isinstance(value, (GaussianRational, QuadExt))


def as_exact(value) -> GaussianRational:
    """Coerce ints, Fractions, pairs, and strings into a Gaussian rational."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, QuadExt):
        if value.b:
            raise TypeError("cannot flatten a proper extension element")
        return value.a
    if isinstance(value, (int, Fraction, str)):
        return GaussianRational(value)
    if isinstance(value, tuple) and len(value) == 2:
        return GaussianRational(value[0], value[1])
    if isinstance(value, complex) or isinstance(value, float):
        raise TypeError("floats cannot be promoted to the exact field")
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact scalar")


def as_float(value) -> complex:
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float, Fraction)):
        return complex(value)
    if isinstance(value, (GaussianRational, QuadExt)):
        return complex(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a complex float")


def approx_zero(value, scale: float, tol: float = DEFAULT_TOL) -> bool:
    """Relative float zero test against the scale of the containing object."""
    if scale <= 0.0:
        return abs(value) == 0.0
    return abs(value) <= tol * scale


def scalar_is_zero(value, scale: float = 1.0, tol: float = DEFAULT_TOL) -> bool:
    """Mode-aware zero test: exact values test exactly, floats relative to scale."""
    if is_exact(value):
        return not value
    return approx_zero(as_float(value), scale, tol)


def rational_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None when irrational."""
    if f < 0:
        return None
    num, den = f.numerator, f.denominator
    rn = math.isqrt(num)
    if rn * rn != num:
        return None
    rd = math.isqrt(den)
    if rd * rd != den:
        return None
    return Fraction(rn, rd)


def gaussian_sqrt(z: GaussianRational):
    """Exact square root inside the Gaussian rationals, or None if absent."""
    if z.im == 0:
        if z.re >= 0:
            r = rational_sqrt(z.re)
            return None if r is None else GaussianRational(r, 0)
        r = rational_sqrt(-z.re)
        return None if r is None else GaussianRational(0, r)
    norm = rational_sqrt(z.abs_squared())
    if norm is None:
        return None
    u = rational_sqrt((norm + z.re) / 2)
    if u is None or u == 0:
        return None
    v = z.im / (2 * u)
    return GaussianRational(u, v)


def exact_sqrt(z: GaussianRational):
    """Square root of an exact scalar, extending the field when necessary.

    Returns a GaussianRational when z is a perfect square and a QuadExt
    with radicand z otherwise.
    """
    root = gaussian_sqrt(z)
    if root is not None:
        return root
    return QuadExt(0, 1, z)
