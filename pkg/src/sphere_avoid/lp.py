"""Truncated Delsarte-type LPs for orthogonality-avoiding sets on S², an exact
rational simplex, and the odd-cycle cutting-plane loop.

The primal LP over x_0..x_D is::

    max x_0
    sum x_i            = 1
    sum x_i C_i(0)     = 0
    sum x_i C_i(±t_pq) <= (q-1)/(2q)     for each cycle node
    x >= 0

with C_i the Gegenbauer polynomials for S² (ν = 1/2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import (
    NODE_QUAD,
    NODE_QUART,
    AlgebraicReal,
    RatInterval,
    Sign,
    alg_sign,
    default_width,
    enclose_cos_2pi_fraction,
)
from .gegenbauer import GegenbauerTable, build_table, eval_algebraic, eval_interval, eval_rational

log = logging.getLogger(__name__)

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

# coefficients C_i(t) of irrational nodes are rounded down to this dyadic grid
RELAXATION_BITS = 96


# --------------------------------------------------------------------------
# cycle nodes


def node_value(p: int, q: int):
    """t_{p,q} = sqrt(-cos(2πp/q) / (1 - cos(2πp/q))).

    Exact for (1,3), (2,5) and (1,4); otherwise a RatInterval no wider than
    the default enclosure width.
    """
    if q < 3 or p < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"invalid cycle node ({p}, {q})")
    if not Fraction(1, 4) <= Fraction(p, q) <= Fraction(1, 2):
        raise ValueError(f"need 1/4 <= p/q <= 1/2, got {p}/{q}")
    if (p, q) == (1, 3):
        return AlgebraicReal.generator(NODE_QUAD)
    if (p, q) == (2, 5):
        return AlgebraicReal.generator(NODE_QUART)
    if (p, q) == (1, 4):
        return Fraction(0)
    width = default_width()
    cw = width / 64
    while True:
        c = enclose_cos_2pi_fraction(p, q, cw)
        # -c/(1-c) decreases in c, so evaluate at the endpoints
        ratio = RatInterval(-c.hi / (1 - c.hi), -c.lo / (1 - c.lo))
        t = ratio.sqrt(cw)
        if t.width <= width:
            return t
        cw /= 64


@dataclass(frozen=True)
class CycleNode:
    p: int
    q: int
    sign: str
    value: object = field(compare=False)

    @property
    def rhs(self) -> Fraction:
        return Fraction(self.q - 1, 2 * self.q)

    @property
    def signed_value(self):
        return self.value if self.sign == "+" else -self.value

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.value, RatInterval)

    @property
    def label(self) -> str:
        return f"{self.sign}t({self.p},{self.q})"

    def __repr__(self):
        return f"CycleNode({self.label})"


def make_node(p: int, q: int, sign: str = "+") -> CycleNode:
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    return CycleNode(p, q, sign, node_value(p, q))


def candidate_nodes(q_max: int) -> list[tuple[int, int, str]]:
    """(p, q, sign) for odd q <= q_max, ordered by q, then p, then + before -."""
    out = []
    for q in range(3, q_max + 1, 2):
        for p in range(1, q):
            if math.gcd(p, q) == 1 and Fraction(1, 4) <= Fraction(p, q) <= Fraction(1, 2):
                out.append((p, q, "+"))
                out.append((p, q, "-"))
    return out


def node_coefficient(table: GegenbauerTable, i: int, node: CycleNode):
    """Exact C_i(±t) (Fraction or AlgebraicReal), or a RatInterval enclosure."""
    t = node.signed_value
    if isinstance(t, AlgebraicReal):
        return eval_algebraic(table, i, t)
    if isinstance(t, RatInterval):
        return eval_interval(table, i, t)
    return eval_rational(table, i, t)


def _lower_rational(value, bits: int = RELAXATION_BITS) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, AlgebraicReal):
        if value.is_rational():
            return value.coefficients[0]
        return value.enclosure(bits + 8).rounded(bits).lo
    return value.rounded(bits).lo


# --------------------------------------------------------------------------
# LP data


@dataclass
class TruncatedLP:
    n: int
    degree: int
    nodes: list
    table: GegenbauerTable
    eq_rows: list
    eq_rhs: list
    ineq_rows: list  # exact coefficient entries
    ineq_rhs: list

    @property
    def num_vars(self) -> int:
        return self.degree + 1

    @property
    def objective(self) -> list[Fraction]:
        c = [Fraction(0)] * self.num_vars
        c[0] = Fraction(1)
        return c

    def relaxed_ineq_rows(self, bits: int = RELAXATION_BITS) -> list[list[Fraction]]:
        """Rows with every coefficient replaced by a rational lower bound.

        Since x >= 0 this only weakens each <= row, so the relaxed optimum is
        an upper bound for the exact truncated LP.
        """
        return [[_lower_rational(v, bits) for v in row] for row in self.ineq_rows]

    def with_nodes(self, extra: Sequence[CycleNode]) -> "TruncatedLP":
        return build_primal(self.n, self.degree, list(self.nodes) + list(extra), self.table)


def build_primal(n: int, degree: int, nodes: Sequence[CycleNode] = (), table: GegenbauerTable | None = None) -> TruncatedLP:
    if degree < 2:
        raise ValueError("degree must be at least 2")
    if n < 3:
        raise ValueError("n must be at least 3")
    if nodes and n != 3:
        raise ValueError("cycle constraints are implemented for S^2 only (n = 3)")
    nu = Fraction(n - 2, 2)
    if table is None or table.nu != nu or table.max_degree < degree:
        table = build_table(nu, max(degree, 120))
    eq_rows = [
        [Fraction(1)] * (degree + 1),
        [eval_rational(table, i, 0) for i in range(degree + 1)],
    ]
    ineq_rows, ineq_rhs = [], []
    for node in nodes:
        ineq_rows.append([node_coefficient(table, i, node) for i in range(degree + 1)])
        ineq_rhs.append(node.rhs)
    return TruncatedLP(n, degree, list(nodes), table, eq_rows, [Fraction(1), Fraction(0)], ineq_rows, ineq_rhs)


@dataclass
class LPSolution:
    status: str
    x: list = field(default_factory=list)
    objective: Fraction | None = None
    duals_eq: list = field(default_factory=list)
    duals_ub: list = field(default_factory=list)

    @property
    def duals(self) -> list:
        return list(self.duals_eq) + list(self.duals_ub)


# --------------------------------------------------------------------------
# exact simplex


def _solve_square(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    a = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    pv = tab[row][col]
    prow = [v / pv for v in tab[row]]
    tab[row] = prow
    for r in range(len(tab)):
        if r != row:
            f = tab[r][col]
            if f != 0:
                tab[r] = [v - f * w for v, w in zip(tab[r], prow)]


def _bland(tab, basis, cost, allowed) -> str:
    # maximise cost . x over the tableau; Bland's rule on both choices
    m = len(tab)
    while True:
        entering = None
        for j in allowed:
            if j in basis:
                continue
            red = cost[j] - sum(cost[basis[i]] * tab[i][j] for i in range(m) if tab[i][j] != 0)
            if red > 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        best_row, best_ratio = None, None
        for i in range(m):
            a = tab[i][entering]
            if a > 0:
                ratio = tab[i][-1] / a
                if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and basis[i] < basis[best_row]):
                    best_row, best_ratio = i, ratio
        if best_row is None:
            return UNBOUNDED
        _pivot(tab, best_row, entering)
        basis[best_row] = entering


def simplex(c, a_eq=(), b_eq=(), a_ub=(), b_ub=()) -> LPSolution:
    """Maximise c.x subject to a_eq x = b_eq, a_ub x <= b_ub, x >= 0, exactly.

    Two-phase tableau simplex with Bland's rule.  Optimal solutions come with
    dual values (free on equalities, nonnegative on inequalities) and are
    checked for primal feasibility, dual feasibility and complementary
    slackness before being returned.
    """
    c = [Fraction(v) for v in c]
    nx = len(c)
    a_eq = [[Fraction(v) for v in row] for row in a_eq]
    a_ub = [[Fraction(v) for v in row] for row in a_ub]
    b_eq = [Fraction(v) for v in b_eq]
    b_ub = [Fraction(v) for v in b_ub]
    meq, mub = len(a_eq), len(a_ub)
    m = meq + mub
    nslack = mub
    rows, rhs, flip = [], [], []
    for k in range(m):
        if k < meq:
            row = a_eq[k] + [Fraction(0)] * nslack
            b = b_eq[k]
        else:
            row = a_ub[k - meq] + [Fraction(0)] * nslack
            row[nx + k - meq] = Fraction(1)
            b = b_ub[k - meq]
        s = -1 if b < 0 else 1
        rows.append([s * v for v in row])
        rhs.append(s * b)
        flip.append(s)
    # initial basis: slack where usable, artificial otherwise
    basis = []
    art_of_row = {}
    ncols = nx + nslack
    for k in range(m):
        if k >= meq and flip[k] == 1:
            basis.append(nx + k - meq)
        else:
            art_of_row[k] = ncols + len(art_of_row)
            basis.append(art_of_row[k])
    ntotal = ncols + len(art_of_row)
    tab = []
    for k in range(m):
        row = rows[k] + [Fraction(0)] * len(art_of_row)
        if k in art_of_row:
            row[art_of_row[k]] = Fraction(1)
        tab.append(row + [rhs[k]])
    artificial = set(art_of_row.values())

    if artificial:
        cost1 = [Fraction(0)] * ntotal
        for j in artificial:
            cost1[j] = Fraction(-1)
        _bland(tab, basis, cost1, range(ntotal))
        if any(tab[i][-1] != 0 for i in range(len(tab)) if basis[i] in artificial):
            return LPSolution(INFEASIBLE)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for i in range(len(tab)):
            if basis[i] in artificial:
                col = next((j for j in range(ncols) if tab[i][j] != 0), None)
                if col is None:
                    continue
                _pivot(tab, i, col)
                basis[i] = col
            keep.append(i)
        row_ids = keep
        tab = [tab[i] for i in keep]
        basis = [basis[i] for i in keep]
    else:
        row_ids = list(range(m))

    cost2 = c + [Fraction(0)] * (ntotal - nx)
    status = _bland(tab, basis, cost2, range(ncols))
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED)

    x_full = [Fraction(0)] * ntotal
    for i, j in enumerate(basis):
        x_full[j] = tab[i][-1]
    x = x_full[:nx]
    objective = sum(ci * xi for ci, xi in zip(c, x))

    # duals: y^T B = c_B on the standardised rows that survived
    bmat_t = [[rows[r][j] for r in row_ids] for j in basis]
    y_std = _solve_square(bmat_t, [cost2[j] for j in basis])
    y = [Fraction(0)] * m
    for r, val in zip(row_ids, y_std):
        y[r] = flip[r] * val
    sol = LPSolution(OPTIMAL, x, objective, y[:meq], y[meq:])
    _check_optimality(c, a_eq, b_eq, a_ub, b_ub, sol)
    return sol


def _check_optimality(c, a_eq, b_eq, a_ub, b_ub, sol: LPSolution) -> None:
    x = sol.x
    if any(v < 0 for v in x):
        raise RuntimeError("simplex returned a negative variable")
    for row, b in zip(a_eq, b_eq):
        if sum(a * v for a, v in zip(row, x)) != b:
            raise RuntimeError("equality row violated")
    for row, b, y in zip(a_ub, b_ub, sol.duals_ub):
        slack = b - sum(a * v for a, v in zip(row, x))
        if slack < 0:
            raise RuntimeError("inequality row violated")
        if y < 0:
            raise RuntimeError("negative dual on an inequality row")
        if slack * y != 0:
            raise RuntimeError("complementary slackness fails on a row")
    for j in range(len(c)):
        col = sum(row[j] * y for row, y in zip(a_eq, sol.duals_eq))
        col += sum(row[j] * y for row, y in zip(a_ub, sol.duals_ub))
        reduced = col - c[j]
        if reduced < 0:
            raise RuntimeError(f"dual infeasible in column {j}")
        if reduced * x[j] != 0:
            raise RuntimeError(f"complementary slackness fails in column {j}")
    dual_obj = sum(y * b for y, b in zip(sol.duals_eq, b_eq)) + sum(y * b for y, b in zip(sol.duals_ub, b_ub))
    if dual_obj != sol.objective:
        raise RuntimeError("primal and dual objectives differ")


def solve_exact(lp: TruncatedLP, bits: int = RELAXATION_BITS) -> LPSolution:
    """Solve the rational outer relaxation of ``lp`` exactly."""
    return simplex(lp.objective, lp.eq_rows, lp.eq_rhs, lp.relaxed_ineq_rows(bits), lp.ineq_rhs)


# --------------------------------------------------------------------------
# cutting planes


def _row_value(table, x, node):
    """sum x_i C_i(±t) exactly (field element) or as an interval."""
    if node.is_exact:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                total = total + node_coefficient(table, i, node) * xi
        return total
    total = RatInterval.point(0)
    for i, xi in enumerate(x):
        if xi:
            total = total + node_coefficient(table, i, node) * xi
    return total


def is_violated(x: Sequence[Fraction], node: CycleNode, table: GegenbauerTable) -> bool:
    """True iff sum x_i C_i(±t) > rhs is certain.

    Exact nodes are decided exactly (tight rows are not violated); for
    enclosure-only nodes an undecided comparison counts as not violated.
    """
    val = _row_value(table, x, node)
    if isinstance(val, RatInterval):
        return val.lo > node.rhs
    return alg_sign(val - node.rhs) == Sign.POSITIVE


def generate_cuts(sol: LPSolution, q_max: int, table: GegenbauerTable | None = None) -> list[CycleNode]:
    if sol.status != OPTIMAL:
        raise ValueError("cuts need an optimal solution")
    if table is None or table.max_degree < len(sol.x) - 1:
        table = build_table(Fraction(1, 2), max(len(sol.x) - 1, 120))
    out = []
    for p, q, sign in candidate_nodes(q_max):
        node = make_node(p, q, sign)
        if is_violated(sol.x, node, table):
            out.append(node)
    return out


@dataclass
class Round:
    index: int
    added: list
    objective: Fraction


@dataclass
class CuttingPlaneTrace:
    rounds: list
    lp: TruncatedLP
    solution: LPSolution

    @property
    def objectives(self) -> list[Fraction]:
        return [r.objective for r in self.rounds]

    @property
    def final_objective(self) -> Fraction:
        return self.rounds[-1].objective


def cutting_plane_run(degree: int, q_max: int, max_rounds: int, n: int = 3) -> CuttingPlaneTrace:
    """Start from the weak LP, add every violated cycle row per round, re-solve.

    Stops when a round finds no new violated row or after ``max_rounds``.
    Each reported objective is the exact optimum of a rational relaxation and
    so an upper bound on the truncated LP with the same rows.
    """
    lp = build_primal(n, degree)
    sol = solve_exact(lp)
    if sol.status != OPTIMAL:
        raise RuntimeError(f"weak LP is {sol.status}")
    rounds = [Round(0, [], sol.objective)]
    log.info("round 0: objective %s", sol.objective)
    for r in range(1, max_rounds + 1):
        have = {(nd.p, nd.q, nd.sign) for nd in lp.nodes}
        cuts = [c for c in generate_cuts(sol, q_max, lp.table) if (c.p, c.q, c.sign) not in have]
        if not cuts:
            break
        lp = lp.with_nodes(cuts)
        sol = solve_exact(lp)
        if sol.status != OPTIMAL:
            raise RuntimeError(f"round {r} LP is {sol.status}")
        rounds.append(Round(r, cuts, sol.objective))
        log.info("round %d: added %s, objective %s", r, [c.label for c in cuts], sol.objective)
    return CuttingPlaneTrace(rounds, lp, sol)
