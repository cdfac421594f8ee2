import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from sphere_avoid.graphs import (
    CircleInstance, InstanceTooLarge, build_graph, circle_alpha, circle_points, combinatorial_bound,
    cross_polytope, independence_number, read_points,
)


def brute_alpha(n, edges):
    for k in range(n, 0, -1):
        for sub in itertools.combinations(range(n), k):
            s = set(sub)
            if not any(a in s and b in s for a, b in edges):
                return k
    return 0


def random_graph(rng, n, forbid_count):
    pts = rng.standard_normal((n, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    ips = [float(pts[a] @ pts[b]) for a in range(n) for b in range(a + 1, n)]
    return build_graph(pts.tolist(), rng.choice(ips, size=forbid_count, replace=False).tolist(), "1/1000000000")


def test_octahedron():
    g = build_graph(cross_polytope(3), [0])
    assert g.order == 6 and len(g.edges) == 12
    assert combinatorial_bound(g) == Fraction(1, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cross_polytope_orthogonality_bound_is_one_over_n(n):
    assert combinatorial_bound(build_graph(cross_polytope(n), [0])) == Fraction(1, n)


@pytest.mark.parametrize("q", [5, 7, 9, 11])
def test_odd_cycles(q):
    g = build_graph(circle_points(q), [math.cos(2 * math.pi * (q // 2) / q)])
    assert len(g.edges) == q
    assert combinatorial_bound(g) == Fraction(q // 2, q)


@pytest.mark.parametrize("seed", range(8))
def test_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 15))
    g = random_graph(rng, n, int(rng.integers(1, n)))
    assert independence_number(g) == brute_alpha(g.order, g.edges)


def test_more_forbidden_values_never_increase_alpha():
    rng = np.random.default_rng(3)
    g = random_graph(rng, 14, 4)
    extra = [float(np.dot(g.vertices[0], g.vertices[k])) for k in (1, 2, 3)]
    bigger = g.with_forbidden(extra)
    assert g.edges <= bigger.edges
    assert independence_number(bigger) <= independence_number(g)


def test_exact_input_uses_zero_tolerance():
    g = build_graph([["1", "0"], ["0", "1"], ["-1", "0"]], ["0"])
    assert g.tolerance == 0
    assert len(g.edges) == 2


def test_decimal_input_uses_default_tolerance():
    g = build_graph([["1.0", "0"], ["0", "1"]], ["0"])
    assert g.tolerance == Fraction(1, 10**9)


def test_rejects_one_as_forbidden():
    with pytest.raises(ValueError):
        build_graph(cross_polytope(3), [1])


def test_rejects_non_unit_points():
    with pytest.raises(ValueError):
        build_graph([[1, 1, 0]], [0])


def test_too_large():
    pts = circle_points(70)
    g = build_graph(pts, [0.5])
    with pytest.raises(InstanceTooLarge):
        independence_number(g)


def test_circle_values():
    assert circle_alpha(CircleInstance(1, 4)) == (Fraction(1, 2), True)
    assert circle_alpha(CircleInstance(1, 3)) == (Fraction(1, 3), True)
    assert circle_alpha(CircleInstance(2, 5)) == (Fraction(2, 5), True)
    assert circle_alpha(CircleInstance(3, 7)) == (Fraction(3, 7), True)
    assert circle_alpha(CircleInstance()) == (Fraction(1, 2), False)


@pytest.mark.parametrize("p,q", [(2, 4), (0, 3), (3, 3), (1, None)])
def test_circle_invalid(p, q):
    with pytest.raises(ValueError):
        CircleInstance(p, q)


def test_circle_values_match_cycle_graphs():
    # odd rotation p/q: the orbit of one point is a q-cycle, α = (q-1)/2
    for q in (3, 5, 7, 9):
        for p in range(1, q):
            if math.gcd(p, q) != 1 or not (Fraction(1, 4) <= Fraction(p, q) <= Fraction(1, 2)):
                continue
            g = build_graph(circle_points(q), [math.cos(2 * math.pi * p / q)])
            assert combinatorial_bound(g) == circle_alpha(CircleInstance(p, q))[0]


def test_read_points():
    rows = read_points("# octahedron slice\n3 2\n1 0 0\n0 1 0\n")
    assert rows == [["1", "0", "0"], ["0", "1", "0"]]
    with pytest.raises(ValueError):
        read_points("3 2\n1 0 0\n")
    with pytest.raises(ValueError):
        read_points("3 1\n1 0\n")
