"""Exact scalars: rationals, rational intervals, and small real radical fields.

Everything here is immutable.  Rationals are :class:`fractions.Fraction`;
intervals carry rational endpoints so interval arithmetic is exact and the
only outward rounding happens in :meth:`RatInterval.rounded`, which widens.
"""
from __future__ import annotations

import enum
import functools
import math
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

DEFAULT_WIDTH = Fraction(1, 10**30)


def parse_rational(value) -> Fraction:
    """Parse ``"a/b"``, an integer, or a finite decimal string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite number: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(x: Fraction) -> str:
    """Canonical ``"num/den"`` form; the denominator is always printed."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def default_width() -> Fraction:
    """Enclosure width, overridable with ``SPHERE_AVOID_PRECISION``."""
    raw = os.environ.get("SPHERE_AVOID_PRECISION")
    if not raw:
        return DEFAULT_WIDTH
    w = parse_rational(raw)
    if w <= 0:
        raise ValueError("SPHERE_AVOID_PRECISION must be positive")
    return w


def _bits_for(width: Fraction) -> int:
    # smallest k with 2**-k <= width
    if width <= 0:
        raise ValueError("width must be positive")
    k = 0
    while Fraction(1, 1 << k) > width:
        k += 1
    return k


def _iroot(n: int, e: int) -> int:
    """floor(n ** (1/e)) for n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    if e == 2:
        return math.isqrt(n)
    if e == 4:
        return math.isqrt(math.isqrt(n))
    x = 1 << ((n.bit_length() + e - 1) // e)
    while True:
        y = ((e - 1) * x + n // x ** (e - 1)) // e
        if y >= x:
            break
        x = y
    while x**e > n:
        x -= 1
    while (x + 1) ** e <= n:
        x += 1
    return x


@dataclass(frozen=True)
class RatInterval:
    """Closed interval with rational endpoints.

    Arithmetic between intervals is exact on the endpoints, so every
    operation returns a superset of the exact-real image.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "RatInterval":
        x = Fraction(x)
        return cls(x, x)

    @staticmethod
    def _coerce(other) -> "RatInterval":
        if isinstance(other, RatInterval):
            return other
        return RatInterval.point(other)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, RatInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __add__(self, other):
        o = self._coerce(other)
        return RatInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return RatInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RatInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> "RatInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        if k == 0:
            return RatInterval.point(1)
        if self.lo >= 0:
            return RatInterval(self.lo**k, self.hi**k)
        if self.hi <= 0:
            a, b = self.hi**k, self.lo**k
            return RatInterval(min(a, b), max(a, b))
        # straddles zero
        if k % 2:
            return RatInterval(self.lo**k, self.hi**k)
        return RatInterval(0, max(self.lo**k, self.hi**k))

    def abs_max(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def sqrt(self, width: Fraction | None = None) -> "RatInterval":
        """Outward enclosure of the square roots of every point in the interval."""
        if self.lo < 0:
            raise ValueError("square root of an interval reaching below zero")
        w = default_width() if width is None else Fraction(width)
        return RatInterval(root_interval(self.lo, 2, w).lo, root_interval(self.hi, 2, w).hi)

    def rounded(self, bits: int) -> "RatInterval":
        """Widen to the dyadic grid ``2**-bits`` (keeps denominators small)."""
        scale = 1 << bits
        lo = Fraction(math.floor(self.lo * scale), scale)
        hi = Fraction(math.ceil(self.hi * scale), scale)
        return RatInterval(lo, hi)

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"RatInterval({float(self.lo):.17g}, {float(self.hi):.17g})"


def root_interval(r, e: int, width) -> RatInterval:
    """Enclosure of the positive real ``r ** (1/e)`` with width at most ``width``.

    Exact (degenerate) whenever the root is rational.
    """
    r = Fraction(r)
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    if r < 0:
        raise ValueError("negative radicand")
    p, q = r.numerator, r.denominator
    # r^(1/e) = (p * q^(e-1))^(1/e) / q
    n = p * q ** (e - 1)
    s = _iroot(n, e)
    if s**e == n:
        return RatInterval.point(Fraction(s, q))
    k = _bits_for(width * q)
    s = _iroot(n << (e * k), e)
    den = q << k
    return RatInterval(Fraction(s, den), Fraction(s + 1, den))


def enclose_sqrt(r, width) -> RatInterval:
    return root_interval(r, 2, width)


def _arctan_inv(x: int, width: Fraction) -> RatInterval:
    # arctan(1/x) by its alternating series; consecutive partial sums bracket it
    s = Fraction(0)
    k = 0
    while True:
        term = Fraction(1, (2 * k + 1) * x ** (2 * k + 1))
        nxt = s + term if k % 2 == 0 else s - term
        if term <= width:
            return RatInterval(min(s, nxt), max(s, nxt))
        s = nxt
        k += 1


def _pi_interval(width: Fraction) -> RatInterval:
    # Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    a = _arctan_inv(5, width / 64)
    b = _arctan_inv(239, width / 64)
    pi = 16 * a - 4 * b
    return pi.rounded(_bits_for(width) + 2)


@functools.lru_cache(maxsize=None)
def _cached_pi(width: Fraction) -> RatInterval:
    return _pi_interval(width)


def enclose_pi(width=None) -> RatInterval:
    """Certified enclosure of pi.  Widths at or above 1e-30 share one cached value."""
    w = DEFAULT_WIDTH if width is None else Fraction(width)
    if w <= 0:
        raise ValueError("width must be positive")
    if w >= DEFAULT_WIDTH:
        return _cached_pi(DEFAULT_WIDTH)
    return _cached_pi(w)


def enclose_constant(name, width) -> RatInterval:
    """Enclose ``"PI"`` or ``("SQRT", r)`` to within ``width``."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    if name == "PI":
        return enclose_pi(width)
    if isinstance(name, tuple) and len(name) == 2 and name[0] == "SQRT":
        r = parse_rational(name[1])
        if r < 0:
            raise ValueError("square root of a negative rational")
        return enclose_sqrt(r, width)
    raise ValueError(f"unknown constant {name!r}")


def _cos_point(y: Fraction, tol: Fraction) -> RatInterval:
    # Taylor series of cos at rational 0 <= y <= 2: terms decrease from k = 1 on
    # and alternate, so consecutive partial sums bracket cos(y).
    if not 0 <= y <= 2:
        raise ValueError("cos series used outside [0, 2]")
    s = Fraction(1)
    term = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * y * y / ((2 * k - 1) * (2 * k))
        nxt = s - term if k % 2 else s + term
        if term <= tol:
            return RatInterval(min(s, nxt), max(s, nxt))
        s = nxt


def enclose_cos_2pi_fraction(p: int, q: int, width=None) -> RatInterval:
    """Enclosure of cos(2*pi*p/q) for 1/4 <= p/q <= 1/2."""
    w = default_width() if width is None else Fraction(width)
    frac = Fraction(p, q)
    if not Fraction(1, 4) <= frac <= Fraction(1, 2):
        raise ValueError("expected 1/4 <= p/q <= 1/2")
    pw = w / 8
    while True:
        # cos(2 pi p/q) = -cos(y),  y = pi (1 - 2p/q) in [0, pi/2]
        y = enclose_pi(pw) * (1 - 2 * frac)
        ylo = max(y.lo, Fraction(0))
        # cos decreases on [0, pi]
        c = RatInterval(_cos_point(y.hi, pw).lo, _cos_point(ylo, pw).hi)
        out = (-c).rounded(_bits_for(w) + 4)
        if out.hi > 0:
            # the true value is <= 0 on this range
            out = RatInterval(min(out.lo, Fraction(0)), Fraction(0))
        if out.width <= w:
            return out
        pw /= 16


# --------------------------------------------------------------------------
# radical fields


class Sign(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _is_rational_power(a: Fraction, e: int) -> bool:
    p, q = a.numerator, a.denominator
    return p >= 0 and _iroot(p, e) ** e == p and _iroot(q, e) ** e == q


@dataclass(frozen=True)
class FieldSpec:
    """A real field Q(θ) with θ² = a (QUAD), θ⁴ = a (QUART), or the
    compositum Q(φ, ψ) with φ² = a, ψ⁴ = b (COMPOSITUM).

    Generators are the positive real roots.
    """

    kind: str
    radicands: tuple

    def __post_init__(self):
        rads = tuple(Fraction(a) for a in self.radicands)
        object.__setattr__(self, "radicands", rads)
        expected = {"QUAD": 1, "QUART": 1, "COMPOSITUM": 2}
        if self.kind not in expected:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if len(rads) != expected[self.kind]:
            raise ValueError("wrong number of radicands")
        if any(a <= 0 for a in rads):
            raise ValueError("radicands must be positive")
        if self.kind == "QUAD" and _is_rational_power(rads[0], 2):
            raise ValueError(f"x^2 - {rads[0]} is reducible")
        if self.kind == "QUART" and _is_rational_power(rads[0], 2):
            # a>0: x^4 - a is reducible iff a is a square
            raise ValueError(f"x^4 - {rads[0]} is reducible")
        if self.kind == "COMPOSITUM":
            a, b = rads
            # Q(b^(1/4)) has the single quadratic subfield Q(sqrt b)
            if _is_rational_power(a, 2) or _is_rational_power(b, 2) or _is_rational_power(a * b, 2):
                raise ValueError("compositum does not have degree 8")

    @classmethod
    def quad(cls, a) -> "FieldSpec":
        return cls("QUAD", (parse_rational(a),))

    @classmethod
    def quart(cls, a) -> "FieldSpec":
        return cls("QUART", (parse_rational(a),))

    @classmethod
    def compositum(cls, a, b) -> "FieldSpec":
        return cls("COMPOSITUM", (parse_rational(a), parse_rational(b)))

    @property
    def generators(self) -> tuple:
        """((exponent, radicand), ...) with the first generator varying fastest."""
        if self.kind == "QUAD":
            return ((2, self.radicands[0]),)
        if self.kind == "QUART":
            return ((4, self.radicands[0]),)
        return ((2, self.radicands[0]), (4, self.radicands[1]))

    @property
    def degree(self) -> int:
        return math.prod(e for e, _ in self.generators)

    def exponents(self, index: int) -> tuple:
        out = []
        for e, _ in self.generators:
            out.append(index % e)
            index //= e
        return tuple(out)

    def index(self, exps: Sequence[int]) -> int:
        idx, mul = 0, 1
        for (e, _), k in zip(self.generators, exps):
            idx += k * mul
            mul *= e
        return idx

    def __str__(self):
        if self.kind == "QUAD":
            return f"Q(θ), θ^2 = {self.radicands[0]}"
        if self.kind == "QUART":
            return f"Q(θ), θ^4 = {self.radicands[0]}"
        return f"Q(φ, ψ), φ^2 = {self.radicands[0]}, ψ^4 = {self.radicands[1]}"


NODE_QUAD = FieldSpec.quad(Fraction(1, 3))
NODE_QUART = FieldSpec.quart(Fraction(1, 5))
NODE_COMPOSITUM = FieldSpec.compositum(Fraction(1, 3), Fraction(1, 5))


def reduce_mod_minpoly(coeffs: Iterable, field: FieldSpec) -> list[Fraction]:
    """Reduce a polynomial in θ modulo θ^e - a; returns exactly ``field.degree`` coefficients.

    Only single-generator fields have a polynomial variable to reduce in.
    """
    if field.kind == "COMPOSITUM":
        raise ValueError("reduce_mod_minpoly needs a single-generator field")
    (e, a), = field.generators
    cs = [Fraction(c) for c in coeffs]
    out = [Fraction(0)] * e
    # θ^k = a^(k // e) θ^(k % e)
    apow = Fraction(1)
    for block in range(0, len(cs), e):
        for r, c in enumerate(cs[block:block + e]):
            if c:
                out[r] += c * apow
        apow *= a
    return out


@dataclass(frozen=True, eq=False)
class AlgebraicReal:
    """Element of a :class:`FieldSpec` field, stored by its coefficient vector.

    ``enclosure(bits)`` gives a rational interval around the real value; it
    can be made as narrow as wanted.
    """

    field: FieldSpec
    coefficients: tuple
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coefficients)
        if len(cs) != self.field.degree:
            raise ValueError(f"expected {self.field.degree} coefficients, got {len(cs)}")
        object.__setattr__(self, "coefficients", cs)

    @classmethod
    def from_rational(cls, x, fld: FieldSpec) -> "AlgebraicReal":
        cs = [Fraction(0)] * fld.degree
        cs[0] = Fraction(x)
        return cls(fld, tuple(cs))

    @classmethod
    def generator(cls, fld: FieldSpec, which: int = 0) -> "AlgebraicReal":
        exps = [0] * len(fld.generators)
        exps[which] = 1
        cs = [Fraction(0)] * fld.degree
        cs[fld.index(exps)] = Fraction(1)
        return cls(fld, tuple(cs))

    @classmethod
    def from_polynomial(cls, coeffs, fld: FieldSpec) -> "AlgebraicReal":
        return cls(fld, tuple(reduce_mod_minpoly(coeffs, fld)))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def is_rational(self) -> bool:
        return not any(self.coefficients[1:])

    def _lift(self, other) -> "AlgebraicReal":
        if isinstance(other, AlgebraicReal):
            if other.field == self.field:
                return other
            if self.field.kind == "COMPOSITUM":
                return to_compositum(other, self.field)
            raise ValueError(f"mixing fields {self.field} and {other.field}")
        if isinstance(other, (int, Fraction)):
            return AlgebraicReal.from_rational(other, self.field)
        return NotImplemented

    def _binary_field(self, other):
        # put both operands in one field, promoting to the compositum if needed
        if isinstance(other, AlgebraicReal) and other.field != self.field:
            if other.field.kind == "COMPOSITUM":
                return to_compositum(self, other.field), other
            if self.field.kind != "COMPOSITUM":
                return to_compositum(self), to_compositum(other)
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented, NotImplemented
        return self, o

    def __add__(self, other):
        a, b = self._binary_field(other)
        if a is NotImplemented:
            return NotImplemented
        return AlgebraicReal(a.field, tuple(x + y for x, y in zip(a.coefficients, b.coefficients)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicReal(self.field, tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraicReal(self.field, tuple(c * other for c in self.coefficients))
        a, b = self._binary_field(other)
        if a is NotImplemented:
            return NotImplemented
        fld = a.field
        gens = fld.generators
        out = [Fraction(0)] * fld.degree
        nz_a = [(i, c) for i, c in enumerate(a.coefficients) if c]
        nz_b = [(j, c) for j, c in enumerate(b.coefficients) if c]
        for i, ca in nz_a:
            ea = fld.exponents(i)
            for j, cb in nz_b:
                eb = fld.exponents(j)
                coef = ca * cb
                exps = []
                for (e, rad), x, y in zip(gens, ea, eb):
                    k = x + y
                    if k >= e:
                        k -= e
                        coef *= rad
                    exps.append(k)
                out[fld.index(exps)] += coef
        return AlgebraicReal(fld, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = AlgebraicReal.from_rational(1, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicReal.from_rational(other, self.field)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.field, self.coefficients))

    def enclosure(self, bits: int = 64) -> RatInterval:
        """Interval around the real value; width shrinks like ``2**-bits``."""
        hit = self._cache.get(bits)
        if hit is not None:
            return hit
        width = Fraction(1, 1 << bits)
        gens = [root_interval(a, e, width) for e, a in self.field.generators]
        total = RatInterval.point(0)
        for idx, c in enumerate(self.coefficients):
            if not c:
                continue
            mono = RatInterval.point(1)
            for g, k in zip(gens, self.field.exponents(idx)):
                mono = mono * (g**k)
            total = total + mono * c
        self._cache[bits] = total
        return total

    def enclosure_with_width(self, width) -> RatInterval:
        width = Fraction(width)
        bits = 64
        while True:
            enc = self.enclosure(bits)
            if enc.width <= width:
                return enc
            bits *= 2

    def sign(self) -> Sign:
        return alg_sign(self)

    def __float__(self):
        # refine until the enclosure pins down a double; cancellation can eat many bits
        if self.is_zero():
            return 0.0
        bits = 64
        while True:
            enc = self.enclosure(bits)
            if enc.width <= abs(enc.mid) / (1 << 60):
                return float(enc.mid)
            bits *= 2

    def __repr__(self):
        return f"AlgebraicReal({self.format()}; {self.field})"

    def format(self) -> str:
        names = ("θ",) if self.field.kind != "COMPOSITUM" else ("φ", "ψ")
        parts = []
        for idx, c in enumerate(self.coefficients):
            if not c:
                continue
            mono = "*".join(
                n if k == 1 else f"{n}^{k}"
                for n, k in zip(names, self.field.exponents(idx))
                if k
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"


def alg_sign(x) -> Sign:
    """Exact sign: coefficient-vector zero test, then refine the enclosure until it excludes 0."""
    if isinstance(x, (int, Fraction)):
        return Sign((x > 0) - (x < 0))
    if x.is_zero():
        return Sign.ZERO
    if x.is_rational():
        c = x.coefficients[0]
        return Sign.POSITIVE if c > 0 else Sign.NEGATIVE
    bits = 64
    while True:
        enc = x.enclosure(bits)
        if enc.lo > 0:
            return Sign.POSITIVE
        if enc.hi < 0:
            return Sign.NEGATIVE
        bits *= 2


def to_compositum(x, target: FieldSpec = NODE_COMPOSITUM) -> AlgebraicReal:
    """Embed an element of Q(√a) or Q(b^(1/4)) into Q(√a, b^(1/4))."""
    if target.kind != "COMPOSITUM":
        raise ValueError("target must be a compositum field")
    if isinstance(x, (int, Fraction)):
        return AlgebraicReal.from_rational(x, target)
    src = x.field
    if src == target:
        return x
    a, b = target.radicands
    if src.kind == "QUAD" and src.radicands[0] == a:
        slot = 0
    elif src.kind == "QUART" and src.radicands[0] == b:
        slot = 1
    else:
        raise ValueError(f"{src} does not embed in {target}")
    out = [Fraction(0)] * target.degree
    for k, c in enumerate(x.coefficients):
        exps = [0, 0]
        exps[slot] = k
        out[target.index(exps)] = c
    return AlgebraicReal(target, tuple(out))


def exact_value_interval(x, bits: int = 96) -> RatInterval:
    """Enclosure for a Fraction, AlgebraicReal, or RatInterval."""
    if isinstance(x, RatInterval):
        return x
    if isinstance(x, AlgebraicReal):
        return x.enclosure(bits)
    return RatInterval.point(x)


__all__ = [
    "Rational", "RatInterval", "FieldSpec", "AlgebraicReal", "Sign",
    "parse_rational", "format_rational", "default_width", "root_interval",
    "enclose_sqrt", "enclose_pi", "enclose_constant", "enclose_cos_2pi_fraction",
    "reduce_mod_minpoly", "alg_sign", "to_compositum", "exact_value_interval",
    "NODE_QUAD", "NODE_QUART", "NODE_COMPOSITUM", "DEFAULT_WIDTH",
]
