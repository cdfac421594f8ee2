from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from sphere_avoid.gegenbauer import build_table, eval_algebraic
from sphere_avoid.lp import (
    INFEASIBLE, OPTIMAL, UNBOUNDED, build_primal, candidate_nodes, cutting_plane_run, generate_cuts,
    is_violated, make_node, node_value, simplex, solve_exact,
)

CERT_OBJECTIVE = Fraction(4694899, 15000000)


@pytest.mark.parametrize("degree", [2, 10, 20, 40])
def test_weak_lp_value(degree):
    sol = solve_exact(build_primal(3, degree))
    assert sol.status == OPTIMAL and sol.objective == Fraction(1, 3)


def test_weak_lp_feasible_point():
    lp = build_primal(3, 10)
    x = [Fraction(1, 3), 0, Fraction(2, 3)] + [0] * 8
    for row, b in zip(lp.eq_rows, lp.eq_rhs):
        assert sum(a * v for a, v in zip(row, x)) == b


def test_infeasible_and_unbounded():
    assert simplex([1], [[1]], [1], [[1]], [0]).status == INFEASIBLE
    assert simplex([1, 0], [], [], [[-1, 1]], [1]).status == UNBOUNDED


def test_degenerate_problem_terminates():
    # classic cycling example for the textbook rule; Bland's rule must finish
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    a = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3], [0, 0, 1, 0]]
    sol = simplex(c, [], [], a, [0, 0, 1])
    assert sol.status == OPTIMAL and sol.objective == Fraction(1, 20)


small = st.integers(-5, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.data())
def test_random_lps_match_highs_and_weak_duality(nx, m, data):
    c = data.draw(st.lists(small, min_size=nx, max_size=nx))
    a = [data.draw(st.lists(small, min_size=nx, max_size=nx)) for _ in range(m)]
    b = data.draw(st.lists(st.integers(0, 10), min_size=m, max_size=m))
    box = [[1 if j == k else 0 for j in range(nx)] for k in range(nx)]
    a_ub, b_ub = a + box, b + [20] * nx  # keeps everything bounded
    sol = simplex(c, [], [], a_ub, b_ub)
    ref = linprog([-v for v in c], A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * nx, method="highs")
    assert sol.status == OPTIMAL and ref.status == 0
    assert float(sol.objective) == pytest.approx(-ref.fun, abs=1e-7)
    y = sol.duals_ub
    assert all(v >= 0 for v in y)
    dual_obj = sum(yi * bi for yi, bi in zip(y, b_ub))
    assert dual_obj == sol.objective  # strong duality, exact
    # weak duality against any feasible point: the origin
    assert sum(ci * 0 for ci in c) <= dual_obj


def test_node_values():
    assert node_value(1, 4) == 0
    th = node_value(1, 3)
    assert th * th == Fraction(1, 3)
    psi = node_value(2, 5)
    assert psi**4 == Fraction(1, 5)
    enc = node_value(3, 7)
    assert enc.width <= Fraction(1, 10**30)
    with pytest.raises(ValueError):
        node_value(1, 5)


def test_candidate_order():
    assert candidate_nodes(5) == [(1, 3, "+"), (1, 3, "-"), (2, 5, "+"), (2, 5, "-")]
    assert candidate_nodes(3) == [(1, 3, "+"), (1, 3, "-")]


def test_cuts_from_weak_optimum():
    sol = solve_exact(build_primal(3, 40))
    table = build_table(Fraction(1, 2), 120)
    assert [c.label for c in generate_cuts(sol, 5, table)] == ["+t(2,5)", "-t(2,5)"]
    assert generate_cuts(sol, 3, table) == []
    assert not is_violated(sol.x, make_node(1, 3), table)
    row = sum(xi * eval_algebraic(table, i, make_node(1, 3).value) for i, xi in enumerate(sol.x) if xi)
    assert row == Fraction(1, 3)


def test_relaxed_rows_sit_below_exact_rows():
    lp = build_primal(3, 20, [make_node(2, 5, "+"), make_node(1, 3, "-")])
    for exact_row, relaxed in zip(lp.ineq_rows, lp.relaxed_ineq_rows()):
        for e, r in zip(exact_row, relaxed):
            diff = e - r
            assert (diff >= 0) if isinstance(diff, Fraction) else diff.sign() >= 0


@pytest.mark.slow
def test_cutting_plane_loop():
    trace = cutting_plane_run(40, 5, 10)
    objs = trace.objectives
    assert objs[0] == Fraction(1, 3)
    assert all(a >= b for a, b in zip(objs, objs[1:]))
    assert [c.label for c in trace.rounds[1].added] == ["+t(2,5)", "-t(2,5)"]
    assert trace.final_objective <= CERT_OBJECTIVE
    # the loop stopped because every violated candidate is already a row; those
    # rows are only "violated" by the 2^-96 rounding of the relaxation
    present = {n.label for n in trace.lp.nodes}
    table = build_table(Fraction(1, 2), 120)
    for node in generate_cuts(trace.solution, 5):
        assert node.label in present
        row = sum(xi * eval_algebraic(table, i, node.signed_value) for i, xi in enumerate(trace.solution.x) if xi)
        assert float(row - node.rhs) < 2.0**-80


def test_zero_rounds():
    trace = cutting_plane_run(2, 3, 0)
    assert trace.final_objective == Fraction(1, 3) and len(trace.rounds) == 1


def test_solver_is_deterministic():
    a = cutting_plane_run(20, 5, 3)
    b = cutting_plane_run(20, 5, 3)
    assert a.objectives == b.objectives and a.solution.x == b.solution.x
