"""Gegenbauer polynomials normalised to C_i(1) = 1, Funk-Hecke eigenvalues,
and the Szegő envelope for |C_i^{1/2}(cos θ)|."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    AlgebraicReal,
    RatInterval,
    enclose_pi,
    enclose_sqrt,
    parse_rational,
    reduce_mod_minpoly,
)

DEFAULT_MAX_DEGREE = 120

# widths used inside the Szegő enclosure; far below anything a caller asks for
_ROOT_WIDTH = Fraction(1, 10**40)


@dataclass(frozen=True)
class GegenbauerTable:
    """Monomial coefficients of C_0^ν .. C_D^ν, lowest degree first."""

    nu: Fraction
    max_degree: int
    coeffs: tuple

    def poly(self, i: int) -> tuple:
        self._check(i)
        return self.coeffs[i]

    def _check(self, i: int) -> None:
        if not 0 <= i <= self.max_degree:
            raise IndexError(f"degree {i} outside table range 0..{self.max_degree}")


def _unnormalised(nu: Fraction, max_degree: int) -> list[list[Fraction]]:
    if nu == 0:
        # C_i^0 vanishes identically; the normalised limit is Chebyshev T_i
        polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
        for n in range(2, max_degree + 1):
            prev, prev2 = polys[n - 1], polys[n - 2]
            cur = [Fraction(0)] * (n + 1)
            for k, c in enumerate(prev):
                cur[k + 1] += 2 * c
            for k, c in enumerate(prev2):
                cur[k] -= c
            polys.append(cur)
        return polys[: max_degree + 1]
    # n C_n = 2 (n + ν - 1) x C_{n-1} - (n + 2ν - 2) C_{n-2}
    polys = [[Fraction(1)], [Fraction(0), 2 * nu]]
    for n in range(2, max_degree + 1):
        prev, prev2 = polys[n - 1], polys[n - 2]
        a = Fraction(2) * (n + nu - 1) / n
        b = (n + 2 * nu - 2) / Fraction(n)
        cur = [Fraction(0)] * (n + 1)
        for k, c in enumerate(prev):
            cur[k + 1] += a * c
        for k, c in enumerate(prev2):
            cur[k] -= b * c
        polys.append(cur)
    return polys[: max_degree + 1]


@functools.lru_cache(maxsize=32)
def _build(nu: Fraction, max_degree: int) -> GegenbauerTable:
    rows = []
    for p in _unnormalised(nu, max_degree):
        at_one = sum(p)
        rows.append(tuple(c / at_one for c in p))
    return GegenbauerTable(nu, max_degree, tuple(rows))


def build_table(nu, max_degree: int = DEFAULT_MAX_DEGREE) -> GegenbauerTable:
    """Exact normalised Gegenbauer table for weight (1 - t²)^(ν - 1/2)."""
    nu = parse_rational(nu)
    if nu <= Fraction(-1, 2):
        raise ValueError("nu must exceed -1/2")
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    return _build(nu, int(max_degree))


def table_for_dimension(n: int, max_degree: int = DEFAULT_MAX_DEGREE) -> GegenbauerTable:
    if n < 2:
        raise ValueError("sphere dimension n must be at least 2")
    return build_table(Fraction(n - 2, 2), max_degree)


def eval_rational(table: GegenbauerTable, i: int, t) -> Fraction:
    t = parse_rational(t)
    acc = Fraction(0)
    for c in reversed(table.poly(i)):
        acc = acc * t + c
    return acc


def eval_interval(table: GegenbauerTable, i: int, t: RatInterval) -> RatInterval:
    """Horner evaluation over an interval argument (an outer enclosure)."""
    acc = RatInterval.point(0)
    for c in reversed(table.poly(i)):
        acc = acc * t + c
    return acc


def eval_algebraic(table: GegenbauerTable, i: int, t: AlgebraicReal) -> AlgebraicReal:
    """Exact C_i(t) in t's field.

    When t is the field generator (or its negative) the polynomial is just
    folded modulo the minimal polynomial; otherwise Horner runs in the field.
    """
    if isinstance(t, (int, Fraction)):
        return eval_rational(table, i, t)
    fld = t.field
    coeffs = table.poly(i)
    if fld.kind in ("QUAD", "QUART"):
        unit = [Fraction(0)] * fld.degree
        unit[1] = Fraction(1)
        cs = t.coefficients
        for sgn in (1, -1):
            if cs == tuple(sgn * u for u in unit):
                signed = [c * sgn**k for k, c in enumerate(coeffs)]
                return AlgebraicReal(fld, tuple(reduce_mod_minpoly(signed, fld)))
    acc = AlgebraicReal.from_rational(0, fld)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def evaluate(table: GegenbauerTable, i: int, t):
    """Dispatch on the argument type: Fraction, AlgebraicReal or RatInterval."""
    if isinstance(t, AlgebraicReal):
        return eval_algebraic(table, i, t)
    if isinstance(t, RatInterval):
        return eval_interval(table, i, t)
    return eval_rational(table, i, t)


@dataclass(frozen=True)
class WeightConstants:
    """ω_n = 2 π^(n/2) / Γ(n/2), held as ``factor * π**pi_power``."""

    n: int
    factor: Fraction
    pi_power: int

    def enclosure(self, width=None) -> RatInterval:
        pi = enclose_pi(width)
        return (pi**self.pi_power) * self.factor


def weight_constants(n: int) -> WeightConstants:
    if n < 1:
        raise ValueError("n must be positive")
    m, odd = divmod(n, 2)
    if not odd:
        # Γ(m) = (m-1)!
        return WeightConstants(n, Fraction(2, math.factorial(m - 1)), m)
    # Γ(m + 1/2) = (1/2)(3/2)...(m - 1/2) √π, and the √π cancels
    r = Fraction(1)
    for k in range(m):
        r *= Fraction(2 * k + 1, 2)
    return WeightConstants(n, 2 / r, m)


def weight(nu, t) -> float:
    """r_ν(t) = (1 - t²)^(ν - 1/2) in floating point, for quadrature."""
    return (1.0 - float(t) ** 2) ** (float(nu) - 0.5)


def eigenvalue_mu(n: int, d: int, t, table: GegenbauerTable | None = None):
    """μ_d(t) = C_d^{(n-2)/2}(t) (1 - t²)^{(n-3)/2}.

    Exact Fraction for n = 3; a RatInterval otherwise.
    """
    if n < 3:
        raise ValueError("eigenvalues are defined for n >= 3")
    if d < 0:
        raise ValueError("degree must be nonnegative")
    t = parse_rational(t)
    if not -1 < t < 1:
        raise ValueError("t must lie strictly between -1 and 1")
    if table is None or table.nu != Fraction(n - 2, 2) or table.max_degree < d:
        table = build_table(Fraction(n - 2, 2), max(d, 1))
    c = eval_rational(table, d, t)
    if n == 3:
        return c
    s = 1 - t * t
    k, half = divmod(n - 3, 2)
    factor = RatInterval.point(s**k)
    if half:
        factor = factor * enclose_sqrt(s, _ROOT_WIDTH)
    return factor * c


def gamma_ratio_half(i: int) -> Fraction:
    """Γ(i+1) / Γ(i+3/2) with the 1/√π factor stripped off (exact rational)."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    r = Fraction(math.factorial(i))
    for k in range(i + 1):
        r /= Fraction(2 * k + 1, 2)
    return r


def szego_bound(i: int, sin_theta: RatInterval, width=None) -> RatInterval:
    """Enclosure of

        √2 / (√π √s) · Γ(i+1)/Γ(i+3/2)  +  1 / (√π 2^{3/2} s^{3/2}) · Γ(i+1)/Γ(i+5/2)

    for s ranging over ``sin_theta``.  Both Gamma ratios are rationals times
    1/√π, so the whole expression is (1/π) times algebraic factors.
    """
    if i < 0:
        raise ValueError("i must be nonnegative")
    s = sin_theta if isinstance(sin_theta, RatInterval) else RatInterval.point(sin_theta)
    if s.lo <= 0:
        raise ValueError("sin θ must stay away from 0")
    if s.hi > 1:
        raise ValueError("sin θ cannot exceed 1")
    rw = _ROOT_WIDTH if width is None else min(_ROOT_WIDTH, Fraction(width) / 10**6)
    inv_pi = enclose_pi(rw).reciprocal()
    sqrt2 = enclose_sqrt(2, rw)
    root_s = s.sqrt(rw)
    a = gamma_ratio_half(i)
    b = a / (i + Fraction(3, 2))
    first = sqrt2 * a / root_s
    second = RatInterval.point(b) / (2 * sqrt2 * s * root_s)
    return ((first + second) * inv_pi).rounded(160)


def szego_step_ratio(i: int) -> tuple[Fraction, Fraction]:
    """Per-step factors of the two Szegő terms when i goes to i + 1.

    ``(i+1)/(i+3/2)`` for the first term and ``(i+1)/(i+5/2)`` for the second;
    both are below 1, so each term decreases.
    """
    if i < 0:
        raise ValueError("i must be nonnegative")
    return (Fraction(i + 1) / (i + Fraction(3, 2)), Fraction(i + 1) / (i + Fraction(5, 2)))
