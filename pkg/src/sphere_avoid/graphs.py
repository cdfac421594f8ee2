"""Forbidden-inner-product graphs on sphere points and the averaging bound.

If V is a finite point set on the sphere and H the graph joining points whose
inner product is forbidden, every avoiding set has measure at most
α(H)/|V|.  For a single forbidden product on the circle the exact values are
known in closed form (:func:`circle_alpha`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .exact import parse_rational

DEFAULT_VERTEX_CAP = 64
DECIMAL_TOLERANCE = Fraction(1, 10**9)


class InstanceTooLarge(ValueError):
    pass


def _parse_coordinate(value) -> tuple[Fraction, bool]:
    """Return (value, exact) where ``exact`` is False for decimal/float input."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return Fraction(value), True
    if isinstance(value, float):
        return Fraction(value), False
    if isinstance(value, str):
        text = value.strip()
        decimal = any(ch in text for ch in ".eE")
        return Fraction(text), not decimal
    raise TypeError(f"bad coordinate {value!r}")


@dataclass(frozen=True)
class UnitVectorGraph:
    dimension: int
    vertices: tuple
    forbidden: tuple
    tolerance: Fraction
    edges: frozenset

    @property
    def order(self) -> int:
        return len(self.vertices)

    def neighbours(self, v: int) -> set[int]:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def adjacency_masks(self) -> np.ndarray:
        masks = [0] * self.order
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return np.array(masks, dtype=np.uint64)

    def with_forbidden(self, extra: Iterable) -> "UnitVectorGraph":
        """The graph over the same points with more forbidden products."""
        return build_graph(self.vertices, list(self.forbidden) + list(extra), self.tolerance)


def build_graph(points: Sequence[Sequence], forbidden: Iterable, tolerance=None) -> UnitVectorGraph:
    """Join two points when their inner product is within ``tolerance`` of a forbidden value.

    With exact rational input the default tolerance is 0; any decimal or
    float coordinate switches the default to 1e-9.
    """
    pts = []
    exact = True
    for p in points:
        row = []
        for x in p:
            val, ok = _parse_coordinate(x)
            exact &= ok
            row.append(val)
        pts.append(tuple(row))
    if not pts:
        raise ValueError("need at least one point")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points have different dimensions")
    xs = []
    for x in forbidden:
        val, ok = _parse_coordinate(x)
        exact &= ok
        xs.append(val)
    tol = (Fraction(0) if exact else DECIMAL_TOLERANCE) if tolerance is None else parse_rational(tolerance)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if any(abs(x - 1) <= tol for x in xs):
        raise ValueError("1 cannot be a forbidden inner product (every point would be adjacent to itself)")
    for k, p in enumerate(pts):
        if abs(sum(c * c for c in p) - 1) > tol:
            raise ValueError(f"point {k} is not a unit vector")
    edges = set()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            ip = sum(a * b for a, b in zip(pts[i], pts[j]))
            if any(abs(ip - x) <= tol for x in xs):
                edges.add((i, j))
    return UnitVectorGraph(dim, tuple(pts), tuple(xs), tol, frozenset(edges))


def independence_number(g: UnitVectorGraph, cap: int = DEFAULT_VERTEX_CAP) -> int:
    """Exact α(g) by branch and bound with greedy clique-cover pruning."""
    if g.order > min(cap, 64):
        raise InstanceTooLarge(f"{g.order} vertices exceeds the exact-solver cap of {min(cap, 64)}")
    return _kernels.mis_size(g.adjacency_masks(), g.order)


def combinatorial_bound(g: UnitVectorGraph, cap: int = DEFAULT_VERTEX_CAP) -> Fraction:
    return Fraction(independence_number(g, cap), g.order)


@dataclass(frozen=True)
class CircleInstance:
    """Rotation number p/q of the forbidden angle, or irrational."""

    p: int | None = None
    q: int | None = None

    def __post_init__(self):
        if self.p is None and self.q is None:
            return
        if self.p is None or self.q is None:
            raise ValueError("give both p and q, or neither for an irrational rotation")
        if not 0 < self.p < self.q:
            raise ValueError("need 0 < p/q < 1")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not reduced")

    @classmethod
    def irrational(cls) -> "CircleInstance":
        return cls()

    @property
    def is_irrational(self) -> bool:
        return self.q is None


def circle_alpha(inst: CircleInstance) -> tuple[Fraction, bool]:
    """(α, attained) for one forbidden angle on the circle."""
    if inst.is_irrational:
        return Fraction(1, 2), False
    if inst.q % 2 == 0:
        return Fraction(1, 2), True
    return Fraction(inst.q - 1, 2 * inst.q), True


# --- point sets and file input -------------------------------------------------


def cross_polytope(n: int) -> list[tuple[int, ...]]:
    pts = []
    for k in range(n):
        for s in (1, -1):
            v = [0] * n
            v[k] = s
            pts.append(tuple(v))
    return pts


def circle_points(q: int) -> list[tuple[float, float]]:
    return [(math.cos(2 * math.pi * k / q), math.sin(2 * math.pi * k / q)) for k in range(q)]


def read_points(text: str) -> list[list[str]]:
    """Parse the points format: ``dim m`` then m rows of ``dim`` entries."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty points file")
    try:
        dim, m = (int(x) for x in lines[0])
    except ValueError as exc:
        raise ValueError("first line must be 'dim m'") from exc
    rows = lines[1:]
    if len(rows) != m:
        raise ValueError(f"expected {m} points, found {len(rows)}")
    for k, r in enumerate(rows):
        if len(r) != dim:
            raise ValueError(f"point {k} has {len(r)} entries, expected {dim}")
    return rows
