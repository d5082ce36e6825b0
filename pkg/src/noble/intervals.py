"""Directed-rounding interval arithmetic on multiple-precision floats.

Every quantity that enters a certified bound is carried as a closed interval
[lo, hi] of MPFR numbers, with lo computed rounding toward -inf and hi toward
+inf.  Integer and rational inputs are converted through exact integer
operands of a single directed division, never through a double, so no
precision is lost on entry.

The working precision is fixed at import time; it is deliberately generous
(120 bits) so that rounding noise stays far below the quadrature and tail
widths that dominate every published bracket.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

PRECISION = 120

# The default context is never used for certified arithmetic, but raising its
# precision guards any incidental conversion against silent 53-bit rounding.
gmpy2.get_context().precision = PRECISION

_DOWN = gmpy2.context(precision=PRECISION, round=gmpy2.RoundDown)
_UP = gmpy2.context(precision=PRECISION, round=gmpy2.RoundUp)

_ZERO = gmpy2.mpfr(0)


def _split_rational(value):
    """Exact (numerator, denominator) for int/Fraction/float inputs."""
    if isinstance(value, int):
        return value, 1
    if isinstance(value, Fraction):
        return value.numerator, value.denominator
    if isinstance(value, float):
        return value.as_integer_ratio()
    raise TypeError(f"cannot convert {type(value).__name__} to interval")


class Interval:
    """Closed interval [lo, hi] with outward-rounded arithmetic."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            if isinstance(lo, Interval):
                self.lo, self.hi = lo.lo, lo.hi
                return
            if isinstance(lo, gmpy2.mpfr):
                self.lo = self.hi = lo
                return
            num, den = _split_rational(lo)
            self.lo = _DOWN.div(num, den)
            self.hi = _UP.div(num, den)
            return
        self.lo = lo if isinstance(lo, gmpy2.mpfr) else _DOWN.div(*_split_rational(lo))
        self.hi = hi if isinstance(hi, gmpy2.mpfr) else _UP.div(*_split_rational(hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def exact(value):
        """Interval [v, v] for an exactly representable integer or dyadic."""
        iv = Interval(value)
        if iv.lo != iv.hi:
            raise ValueError(f"{value} is not exactly representable")
        return iv

    @staticmethod
    def hull(*items):
        ivs = [it if isinstance(it, Interval) else Interval(it) for it in items]
        return Interval(min(iv.lo for iv in ivs), max(iv.hi for iv in ivs))

    @staticmethod
    def pi():
        return Interval(_DOWN.const_pi(), _UP.const_pi())

    # -- structure ----------------------------------------------------------

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def width(self):
        return float(_UP.sub(self.hi, self.lo))

    def mid(self):
        return float(self.lo + self.hi) / 2.0

    def contains(self, value):
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        num, den = _split_rational(value)
        # exact comparison: lo <= num/den <= hi via cross-multiplication
        lon, lod = self.lo.as_integer_ratio()
        hin, hid = self.hi.as_integer_ratio()
        return lon * den <= num * lod and num * hid <= hin * den

    def intersect(self, other):
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"disjoint intervals {self} and {other}")
        return Interval(lo, hi)

    def to_fractions(self):
        return (Fraction(*self.lo.as_integer_ratio()),
                Fraction(*self.hi.as_integer_ratio()))

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(_ZERO, max(-self.lo, self.hi))

    def _coerce(other):  # noqa: N805 - helper, not a method on instances
        return other if isinstance(other, Interval) else Interval(other)

    def __add__(self, other):
        o = Interval._coerce(other)
        return Interval(_DOWN.add(self.lo, o.lo), _UP.add(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = Interval._coerce(other)
        return Interval(_DOWN.sub(self.lo, o.hi), _UP.sub(self.hi, o.lo))

    def __rsub__(self, other):
        return Interval._coerce(other).__sub__(self)

    def __mul__(self, other):
        o = Interval._coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = min(_DOWN.mul(a, c), _DOWN.mul(a, d),
                 _DOWN.mul(b, c), _DOWN.mul(b, d))
        hi = max(_UP.mul(a, c), _UP.mul(a, d),
                 _UP.mul(b, c), _UP.mul(b, d))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError(f"division by interval {o} containing 0")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = min(_DOWN.div(a, c), _DOWN.div(a, d),
                 _DOWN.div(b, c), _DOWN.div(b, d))
        hi = max(_UP.div(a, c), _UP.div(a, d),
                 _UP.div(b, c), _UP.div(b, d))
        return Interval(lo, hi)

    def __rtruediv__(self, other):
        return Interval._coerce(other).__truediv__(self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        if n == 0:
            return Interval.exact(1)
        if n % 2 == 0 and self.lo < 0 < self.hi:
            # even power of a sign-changing interval: tight lower bound is 0
            m = abs(self)
            return Interval(_ZERO, _powi_up(m.hi, n))
        result = Interval.exact(1)
        base = self
        e = n
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- monotone elementary functions --------------------------------------

    def exp(self):
        return Interval(_DOWN.exp(self.lo), _UP.exp(self.hi))

    def sqrt(self):
        if self.lo < 0:
            raise ValueError(f"sqrt of interval {self} reaching below 0")
        return Interval(_DOWN.sqrt(self.lo), _UP.sqrt(self.hi))

    def log(self):
        if self.lo <= 0:
            raise ValueError(f"log of interval {self} reaching 0")
        return Interval(_DOWN.log(self.lo), _UP.log(self.hi))

    # -- order --------------------------------------------------------------

    def strictly_less(self, other):
        o = Interval._coerce(other)
        return self.hi < o.lo

    def certainly_leq(self, value):
        """True when every point of the interval is <= value."""
        o = Interval._coerce(value)
        return self.hi <= o.lo

    def certainly_geq(self, value):
        o = Interval._coerce(value)
        return self.lo >= o.hi


def _powi_up(x, n):
    r = gmpy2.mpfr(1)
    for _ in range(n):
        r = _UP.mul(r, x)
    return r


ZERO = Interval.exact(0)
ONE = Interval.exact(1)


def from_fraction(fr):
    """Thin interval around an exact rational."""
    return Interval(Fraction(fr))


def fsum(items):
    """Interval sum of an iterable."""
    total = Interval.exact(0)
    for it in items:
        total = total + it
    return total


def decimal_string(x, digits=40):
    """Exact decimal representation of an MPFR value.

    MPFR numbers are dyadic rationals, so a finite exact decimal exists;
    used by the cache layer for byte-stable round-trips.
    """
    if not isinstance(x, gmpy2.mpfr):
        raise TypeError("decimal_string expects an mpfr value")
    num, den = x.as_integer_ratio()
    num = int(num)
    den = int(den)
    if den == 1:
        return str(num)
    sign = "-" if num < 0 else ""
    num = abs(num)
    # den is a power of two: scale to a power of ten
    k = den.bit_length() - 1
    scaled = num * 5 ** k  # num/2^k = scaled/10^k
    s = str(scaled).rjust(k + 1, "0")
    whole, frac = s[:-k] or "0", s[-k:]
    return f"{sign}{whole}.{frac}" if k else f"{sign}{whole}"


def parse_decimal(text):
    """Exact MPFR value of a decimal string produced by decimal_string."""
    frac = Fraction(text)
    lo = _DOWN.div(frac.numerator, frac.denominator)
    hi = _UP.div(frac.numerator, frac.denominator)
    if lo != hi:
        raise ValueError(f"{text} is not exactly representable at {PRECISION} bits")
    return lo
