"""Dual certificates for the strengthened LP on S² and their verification.

A certificate (b1, b0, b_node ≥ 0) is feasible for the dual when

    b1 + b0 + Σ b_node                              >= 1     (i = 0)
    b1 + C_i(0) b0 + Σ b_node C_i(±t_node)          >= 0     (i >= 1)

and then its objective b1 + Σ rhs_node b_node bounds α(3) from above.
Rows below the cutoff are decided exactly in Q(√(1/3), (1/5)^(1/4)); rows at
and beyond it follow from the Szegő envelope.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import jsonschema

from .exact import (
    NODE_COMPOSITUM,
    AlgebraicReal,
    RatInterval,
    Sign,
    alg_sign,
    format_rational,
    parse_rational,
    to_compositum,
)
from .gegenbauer import GegenbauerTable, build_table, eval_rational, szego_bound, szego_step_ratio
from .lp import CycleNode, make_node, node_coefficient

STEP_AUDIT_END = 200
_SQRT_WIDTH = Fraction(1, 10**40)


class CertificateFormatError(ValueError):
    pass


class NonExactNode(ValueError):
    """A node value is only known as an enclosure, so exact checks are impossible."""


class TailUndecided(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    node: CycleNode
    multiplier: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class DualCertificate:
    n: int
    b1: Fraction
    b0: Fraction
    terms: tuple
    cutoff: int
    claimed_bound: Fraction

    def node_mass(self) -> Fraction:
        return sum((t.multiplier for t in self.terms), Fraction(0))

    def replace(self, **changes) -> "DualCertificate":
        data = dict(n=self.n, b1=self.b1, b0=self.b0, terms=self.terms,
                    cutoff=self.cutoff, claimed_bound=self.claimed_bound)
        data.update(changes)
        data["terms"] = tuple(data["terms"])
        return DualCertificate(**data)


def paper_certificate() -> DualCertificate:
    """The published dual vector (scaled by 10⁻⁶), cutoff 40, claimed bound 0.313."""
    scale = Fraction(1, 10**6)
    b1, b0, b13, b25, b25m = (v * scale for v in (128614, 404413, 36149, 103647, 327177))
    terms = (
        Term(make_node(1, 3, "+"), b13, Fraction(1, 3)),
        Term(make_node(2, 5, "+"), b25, Fraction(2, 5)),
        Term(make_node(2, 5, "-"), b25m, Fraction(2, 5)),
    )
    return DualCertificate(3, b1, b0, terms, 40, Fraction(313, 1000))


def certificate_objective(cert: DualCertificate) -> Fraction:
    return cert.b1 + sum((t.rhs * t.multiplier for t in cert.terms), Fraction(0))


# --------------------------------------------------------------------------
# finite rows


@dataclass(frozen=True)
class Margin:
    i: int
    value: object  # Fraction or AlgebraicReal in the compositum
    sign: Sign
    enclosure: RatInterval


def _table_for(cert: DualCertificate, table: GegenbauerTable | None, degree: int) -> GegenbauerTable:
    if table is not None and table.nu == Fraction(1, 2) and table.max_degree >= degree:
        return table
    return build_table(Fraction(1, 2), max(degree, 120))


def constraint_value(cert: DualCertificate, i: int, table: GegenbauerTable):
    """Exact left-hand side of dual row i (without subtracting the i = 0 target)."""
    total = AlgebraicReal.from_rational(cert.b1 + eval_rational(table, i, 0) * cert.b0, NODE_COMPOSITUM)
    for term in cert.terms:
        if not term.node.is_exact:
            raise NonExactNode(f"{term.node.label} has no exact value")
        if not term.multiplier:
            continue
        coef = node_coefficient(table, i, term.node)
        total = total + to_compositum(coef, NODE_COMPOSITUM) * term.multiplier
    return total


def verify_finite(cert: DualCertificate, table: GegenbauerTable | None = None) -> list[Margin]:
    """Exact margins of rows i = 0 .. cutoff-1 (each must be >= 0)."""
    table = _table_for(cert, table, max(cert.cutoff - 1, 0))
    out = []
    for i in range(cert.cutoff):
        val = constraint_value(cert, i, table)
        sgn = alg_sign(val)
        out.append(Margin(i, val, sgn, val.enclosure(128)))
    return out


# --------------------------------------------------------------------------
# tail


@dataclass(frozen=True)
class AngleReport:
    label: str
    sin_theta: RatInterval
    szego: RatInterval


@dataclass(frozen=True)
class TailReport:
    cutoff: int
    szego: RatInterval
    worst_angle: str
    threshold: Fraction | None
    passed: bool
    angles: tuple
    step_audit_range: tuple
    step_audit_ok: bool
    reason: str = ""


def _sin_enclosure(t) -> RatInterval:
    # sin θ = sqrt(1 - t²), with 1 - t² computed exactly in t's field
    if isinstance(t, RatInterval):
        sq = 1 - t**2
    else:
        sq_exact = 1 - t * t
        sq = sq_exact.enclosure_with_width(_SQRT_WIDTH) if isinstance(sq_exact, AlgebraicReal) else RatInterval.point(sq_exact)
    if sq.lo <= 0:
        raise ValueError("node at ±1 has no Szegő bound")
    return sq.sqrt(_SQRT_WIDTH)


def tail_threshold(cert: DualCertificate) -> Fraction | None:
    """b1 / (|b0| + Σ b_node), or None when the denominator vanishes."""
    denom = abs(cert.b0) + cert.node_mass()
    if denom == 0:
        return None
    return cert.b1 / denom


def verify_tail(cert: DualCertificate, audit_end: int = STEP_AUDIT_END) -> TailReport:
    """Bound every row i >= cutoff with the Szegő envelope.

    For i >= cutoff, |C_i(cos θ)| at the angles in play is at most the
    envelope, so row i is at least b1 - (|b0| + Σ b_node) · envelope.  The
    envelope decreases in i term by term (checked by the step-ratio audit),
    so the check at i = cutoff covers everything beyond.
    """
    if cert.cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    i = cert.cutoff
    angles = [AngleReport("pi/2", RatInterval.point(1), szego_bound(i, RatInterval.point(1)))]
    seen = set()
    for term in cert.terms:
        key = (term.node.p, term.node.q)
        if key in seen:
            continue  # ±t share sin θ
        seen.add(key)
        s = _sin_enclosure(term.node.value)
        angles.append(AngleReport(f"arccos t({term.node.p},{term.node.q})", s, szego_bound(i, s)))
    worst = max(angles, key=lambda a: a.szego.hi)
    audit = range(i, max(audit_end, i) + 1)
    audit_ok = all(r1 < 1 and r2 < 1 for r1, r2 in map(szego_step_ratio, audit))
    threshold = tail_threshold(cert)
    if threshold is None:
        passed = cert.b1 >= 0
        reason = "" if passed else "b1 < 0 with no node mass"
    else:
        if worst.szego.lo <= threshold < worst.szego.hi:
            raise TailUndecided("Szegő enclosure straddles the threshold")
        passed = worst.szego.hi <= threshold
        reason = "" if passed else f"Szegő bound {float(worst.szego.hi):.6g} exceeds threshold {float(threshold):.6g}"
    if not audit_ok:
        passed = False
        reason = reason or "step-ratio audit failed"
    return TailReport(i, worst.szego, worst.label, threshold, passed and audit_ok, tuple(angles),
                      (audit.start, audit.stop - 1), audit_ok, reason)


# --------------------------------------------------------------------------
# verdict


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    objective: Fraction
    claimed_bound: Fraction
    row0_value: Fraction
    margins: tuple
    tail: TailReport | None
    reasons: tuple = field(default_factory=tuple)


def verify(cert: DualCertificate, table: GegenbauerTable | None = None) -> Verdict:
    """Full check; failures are reported in the Verdict, never raised."""
    reasons = []
    if cert.n != 3:
        reasons.append("only n = 3 certificates are supported")
    for t in cert.terms:
        if t.multiplier < 0:
            reasons.append(f"negative multiplier on {t.node.label}")
        if t.rhs != t.node.rhs:
            reasons.append(f"rhs of {t.node.label} should be {t.node.rhs}")
    row0 = cert.b1 + cert.b0 + cert.node_mass()
    if row0 < 1:
        reasons.append(f"i = 0 row: {row0} < 1")
    objective = certificate_objective(cert)
    if objective > cert.claimed_bound:
        reasons.append(f"objective {objective} exceeds claimed bound {cert.claimed_bound}")
    margins: tuple = ()
    try:
        margins = tuple(verify_finite(cert, table))
        bad = [m.i for m in margins if m.sign == Sign.NEGATIVE]
        if bad:
            reasons.append(f"negative margin at i = {bad}")
    except NonExactNode as exc:
        reasons.append(str(exc))
    tail = None
    try:
        tail = verify_tail(cert)
        if not tail.passed:
            reasons.append(f"tail check failed: {tail.reason}")
    except (ValueError, TailUndecided) as exc:
        reasons.append(f"tail check failed: {exc}")
    return Verdict(not reasons, objective, cert.claimed_bound, row0, margins, tail, tuple(reasons))


# --------------------------------------------------------------------------
# JSON

_RAT = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["n", "claimed_bound", "cutoff", "b1", "b0", "terms"],
    "properties": {
        "n": {"type": "integer"},
        "claimed_bound": _RAT,
        "cutoff": {"type": "integer", "minimum": 1},
        "b1": _RAT,
        "b0": _RAT,
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["p", "q", "sign", "multiplier", "rhs"],
                "properties": {
                    "p": {"type": "integer", "minimum": 1},
                    "q": {"type": "integer", "minimum": 3},
                    "sign": {"enum": ["+", "-"]},
                    "multiplier": _RAT,
                    "rhs": _RAT,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def to_json(cert: DualCertificate) -> dict:
    return {
        "n": cert.n,
        "claimed_bound": format_rational(cert.claimed_bound),
        "cutoff": cert.cutoff,
        "b1": format_rational(cert.b1),
        "b0": format_rational(cert.b0),
        "terms": [
            {
                "p": t.node.p,
                "q": t.node.q,
                "sign": t.node.sign,
                "multiplier": format_rational(t.multiplier),
                "rhs": format_rational(t.rhs),
            }
            for t in cert.terms
        ],
    }


def from_json(data) -> DualCertificate:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"not JSON: {exc}") from exc
    try:
        jsonschema.validate(data, CERTIFICATE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise CertificateFormatError(exc.message) from exc
    try:
        terms = tuple(
            Term(make_node(t["p"], t["q"], t["sign"]), parse_rational(t["multiplier"]), parse_rational(t["rhs"]))
            for t in data["terms"]
        )
        return DualCertificate(
            data["n"], parse_rational(data["b1"]), parse_rational(data["b0"]), terms,
            data["cutoff"], parse_rational(data["claimed_bound"]),
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateFormatError(str(exc)) from exc


def certificate_from_solution(lp, sol, cutoff: int | None = None) -> DualCertificate:
    """Read a certificate off the exact duals of a solved truncated LP.

    Duals of the rational relaxation remain feasible for the exact rows up
    to the truncation degree (multipliers are >= 0 and relaxed coefficients
    sit below the exact ones), so the default cutoff is degree + 1.
    """
    b1, b0 = sol.duals_eq
    terms = tuple(
        Term(node, y, node.rhs) for node, y in zip(lp.nodes, sol.duals_ub) if y != 0
    )
    cut = lp.degree + 1 if cutoff is None else cutoff
    cert = DualCertificate(lp.n, b1, b0, terms, cut, Fraction(0))
    return cert.replace(claimed_bound=certificate_objective(cert))


def dumps(cert: DualCertificate) -> str:
    return json.dumps(to_json(cert), indent=2)


def format_terms(terms: Sequence[Term]) -> str:
    return ", ".join(f"{t.node.label}: {format_rational(t.multiplier)}" for t in terms)
