"""Command-line front end.

Exit codes: 0 success / accepted, 1 rejected or violated, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import certificate as cert_mod
from .constructions import monte_carlo_validate, single_t_lower_bound
from .exact import AlgebraicReal, FieldSpec, RatInterval, format_rational, parse_rational
from .gegenbauer import build_table, eigenvalue_mu, evaluate
from .graphs import CircleInstance, build_graph, circle_alpha, combinatorial_bound, independence_number, read_points
from .lp import cutting_plane_run

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2

class InputError(Exception):
    pass


# --- value rendering ---------------------------------------------------------


def _exact_json(value):
    if isinstance(value, (Fraction, int)):
        return format_rational(Fraction(value))
    if isinstance(value, AlgebraicReal):
        enc = value.enclosure(128)
        return {
            "field": {"kind": value.field.kind, "radicands": [format_rational(a) for a in value.field.radicands]},
            "coefficients": [format_rational(c) for c in value.coefficients],
            "enclosure": [format_rational(enc.lo), format_rational(enc.hi)],
        }
    if isinstance(value, RatInterval):
        return {"enclosure": [format_rational(value.lo), format_rational(value.hi)]}
    raise TypeError(type(value))


def _exact_human(value) -> str:
    if isinstance(value, (Fraction, int)):
        v = Fraction(value)
        return f"{format_rational(v)} (≈{float(v):.10g})"
    if isinstance(value, AlgebraicReal):
        return f"{value.format()} in {value.field} (≈{float(value):.10g})"
    if isinstance(value, RatInterval):
        return f"[{float(value.lo):.15g}, {float(value.hi):.15g}]"
    return str(value)


_RAT = {"type": "string", "pattern": r"^-?[0-9]+/[0-9]+$"}
_EXACT = {
    "oneOf": [
        _RAT,
        {"type": "object", "required": ["enclosure"], "properties": {"enclosure": {"type": "array", "items": _RAT}}},
    ]
}

REPORT_SCHEMAS = {
    "verify": {
        "type": "object",
        "required": ["accepted", "objective", "claimed_bound", "margins", "tail", "reasons"],
        "properties": {
            "accepted": {"type": "boolean"},
            "objective": _RAT,
            "claimed_bound": _RAT,
            "row0": _RAT,
            "margins": {"type": "array", "items": {"type": "object", "required": ["i", "sign", "enclosure"]}},
            "tail": {"type": ["object", "null"]},
            "reasons": {"type": "array", "items": {"type": "string"}},
        },
    },
    "bound": {
        "type": "object",
        "required": ["degree", "q_max", "rounds", "objective"],
        "properties": {
            "objective": _RAT,
            "rounds": {"type": "array", "items": {"type": "object", "required": ["round", "added", "objective"],
                                                   "properties": {"objective": _RAT}}},
        },
    },
    "construct": {
        "type": "object",
        "required": ["t", "measure", "caps"],
        "properties": {"t": _RAT, "measure": _EXACT, "validation": {"type": "object"}},
    },
    "circle": {
        "type": "object",
        "required": ["value", "attained"],
        "properties": {"value": _RAT, "attained": {"type": "boolean"}},
    },
    "gegenbauer": {
        "type": "object",
        "required": ["nu", "degree", "at", "value"],
        "properties": {"nu": _RAT, "degree": {"type": "integer"}, "value": _EXACT},
    },
    "graph-bound": {
        "type": "object",
        "required": ["vertices", "edges", "independence_number", "bound"],
        "properties": {"bound": _RAT, "independence_number": {"type": "integer"}},
    },
    "mu": {
        "type": "object",
        "required": ["n", "d", "t", "value"],
        "properties": {"t": _RAT, "value": _EXACT},
    },
}


def _emit(args, human_lines, payload) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in human_lines:
            print(line)


# --- commands ------------------------------------------------------------------


def _verdict_payload(v: cert_mod.Verdict) -> dict:
    tail = None
    if v.tail is not None:
        tail = {
            "cutoff": v.tail.cutoff,
            "szego": [format_rational(v.tail.szego.lo), format_rational(v.tail.szego.hi)],
            "worst_angle": v.tail.worst_angle,
            "threshold": None if v.tail.threshold is None else format_rational(v.tail.threshold),
            "passed": v.tail.passed,
            "step_audit": {"range": list(v.tail.step_audit_range), "ok": v.tail.step_audit_ok},
        }
    return {
        "accepted": v.accepted,
        "objective": format_rational(v.objective),
        "claimed_bound": format_rational(v.claimed_bound),
        "row0": format_rational(v.row0_value),
        "margins": [
            {"i": m.i, "sign": m.sign.name, "enclosure": [format_rational(m.enclosure.lo), format_rational(m.enclosure.hi)]}
            for m in v.margins
        ],
        "tail": tail,
        "reasons": list(v.reasons),
    }


def _report_verdict(args, v: cert_mod.Verdict) -> int:
    lines = [
        f"objective: {format_rational(v.objective)} (≈{float(v.objective):.10f})",
        f"bound: {format_rational(v.claimed_bound)}",
        f"i = 0 row: {format_rational(v.row0_value)} >= 1",
    ]
    if v.margins:
        smallest = sorted(v.margins, key=lambda m: m.enclosure.lo)[:3]
        lines.append("smallest finite margins: " + ", ".join(f"i={m.i}: {float(m.enclosure.mid):.3e}" for m in smallest))
    if v.tail is not None:
        lines.append(
            f"tail at i={v.tail.cutoff}: Szegő <= {float(v.tail.szego.hi):.8f} ({v.tail.worst_angle}), "
            f"threshold {float(v.tail.threshold) if v.tail.threshold is not None else 'n/a'}"
        )
    lines.append("ACCEPTED" if v.accepted else "REJECTED: " + "; ".join(v.reasons))
    _emit(args, lines, _verdict_payload(v))
    return EXIT_OK if v.accepted else EXIT_REJECTED


def cmd_verify_paper(args) -> int:
    return _report_verdict(args, cert_mod.verify(cert_mod.paper_certificate()))


def cmd_verify(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    try:
        cert = cert_mod.from_json(text)
    except cert_mod.CertificateFormatError as exc:
        raise InputError(f"malformed certificate: {exc}") from exc
    return _report_verdict(args, cert_mod.verify(cert))


def cmd_bound(args) -> int:
    trace = cutting_plane_run(args.degree, args.qmax, args.rounds)
    lines = []
    for r in trace.rounds:
        added = ", ".join(c.label for c in r.added) or "-"
        lines.append(f"round {r.index}: added {added}; objective {format_rational(r.objective)} (≈{float(r.objective):.10f})")
    lines.append(f"upper bound: {format_rational(trace.final_objective)} (≈{float(trace.final_objective):.10f})")
    payload = {
        "degree": args.degree,
        "q_max": args.qmax,
        "rounds": [
            {"round": r.index, "added": [c.label for c in r.added], "objective": format_rational(r.objective)}
            for r in trace.rounds
        ],
        "objective": format_rational(trace.final_objective),
    }
    if args.emit_certificate:
        cert = cert_mod.certificate_from_solution(trace.lp, trace.solution)
        Path(args.emit_certificate).write_text(cert_mod.dumps(cert) + "\n")
        lines.append(f"certificate written to {args.emit_certificate} (cutoff {cert.cutoff})")
        payload["certificate"] = args.emit_certificate
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_construct(args) -> int:
    try:
        t = parse_rational(args.t)
        res = single_t_lower_bound(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    lines = [f"t = {_exact_human(t)}", f"lower bound: {_exact_human(res.measure)}"]
    for cap in res.construction.caps:
        lines.append(f"  cap centre {cap.center}, height {_exact_human(cap.height)}")
    payload = {
        "t": format_rational(t),
        "measure": _exact_json(res.measure),
        "caps": [{"center": list(c.center), "height": _exact_json(c.height)} for c in res.construction.caps],
    }
    code = EXIT_OK
    if args.validate:
        if not -1 < t < 1:
            raise InputError("Monte Carlo validation needs -1 < t < 1")
        rep = monte_carlo_validate(res.construction, t, args.samples, args.seed)
        exact = float(res.measure)
        z = abs(rep.measure_estimate - exact) / rep.std_error if rep.std_error else 0.0
        lines.append(
            f"Monte Carlo ({rep.samples} samples, seed {args.seed}): measure ≈ {rep.measure_estimate:.6f} "
            f"± {rep.std_error:.2e} ({z:.2f} s.e. from exact), violations {rep.violations}"
        )
        payload["validation"] = {
            "samples": rep.samples,
            "seed": args.seed,
            "measure_estimate": rep.measure_estimate,
            "std_error": rep.std_error,
            "violations": rep.violations,
        }
        if rep.violations:
            code = EXIT_REJECTED
    _emit(args, lines, payload)
    return code


def cmd_circle(args) -> int:
    try:
        inst = CircleInstance.irrational() if args.irrational else CircleInstance(args.p, args.q)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    value, attained = circle_alpha(inst)
    word = "attained" if attained else "not attained"
    _emit(args, [f"{format_rational(value)} ({word})"], {"value": format_rational(value), "attained": attained})
    return EXIT_OK


_RADICAL = re.compile(r"^(-)?\s*(sqrt|root4)\((.+)\)$")


def parse_point(text: str):
    """A rational ``a/b``, or ``sqrt(r)`` / ``root4(r)`` with optional leading minus."""
    text = text.strip()
    m = _RADICAL.match(text)
    if not m:
        return parse_rational(text)
    neg, kind, rad = m.groups()
    r = parse_rational(rad)
    e = 2 if kind == "sqrt" else 4
    from .exact import root_interval

    enc = root_interval(r, e, Fraction(1, 2**20))
    if enc.lo == enc.hi:
        val = enc.lo
    elif e == 4 and root_interval(r, 2, Fraction(1, 2**20)).width == 0:
        # fourth root of a square: a square root
        val = AlgebraicReal.generator(FieldSpec.quad(root_interval(r, 2, 1).lo))
    else:
        val = AlgebraicReal.generator(FieldSpec.quad(r) if e == 2 else FieldSpec.quart(r))
    return -val if neg else val


def cmd_gegenbauer(args) -> int:
    try:
        nu = parse_rational(args.nu)
        table = build_table(nu, max(args.degree, 0))
        at = parse_point(args.at)
        value = evaluate(table, args.degree, at)
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    _emit(
        args,
        [f"C_{args.degree}^({format_rational(nu)})({args.at}) = {_exact_human(value)}"],
        {"nu": format_rational(nu), "degree": args.degree, "at": args.at, "value": _exact_json(value)},
    )
    return EXIT_OK


def cmd_graph_bound(args) -> int:
    try:
        rows = read_points(Path(args.points).read_text())
        forbid = [x for x in args.forbid.split(",") if x.strip()]
        g = build_graph(rows, forbid, args.tolerance)
        alpha = independence_number(g)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    bound = combinatorial_bound(g)
    lines = [
        f"{g.order} vertices, {len(g.edges)} edges, tolerance {format_rational(g.tolerance)}",
        f"independence number: {alpha}",
        f"bound: {format_rational(bound)} (≈{float(bound):.10g})",
    ]
    payload = {"vertices": g.order, "edges": len(g.edges), "independence_number": alpha, "bound": format_rational(bound)}
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_mu(args) -> int:
    try:
        t = parse_rational(args.t)
        value = eigenvalue_mu(args.n, args.d, t)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    _emit(
        args,
        [f"mu_{args.d}({format_rational(t)}) on S^{args.n - 1} = {_exact_human(value)}"],
        {"n": args.n, "d": args.d, "t": format_rational(t), "value": _exact_json(value)},
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sphere-avoid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-paper-certificate", parents=[common], help="verify the built-in α(3) < 0.313 certificate")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("verify", parents=[common], help="verify a certificate JSON file")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", parents=[common], help="run the cutting-plane LP")
    p.add_argument("--degree", type=int, default=40)
    p.add_argument("--qmax", type=int, default=5)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--emit-certificate", metavar="FILE")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("construct", parents=[common], help="cap construction lower bound for one forbidden t")
    p.add_argument("--t", required=True)
    p.add_argument("--validate", action="store_true")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("circle", parents=[common], help="exact value on the circle for rotation p/q")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--irrational", action="store_true")
    p.set_defaults(func=cmd_circle)

    p = sub.add_parser("gegenbauer", parents=[common], help="evaluate a normalised Gegenbauer polynomial")
    p.add_argument("--nu", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--at", required=True, help="a/b, sqrt(r), root4(r), optionally negated")
    p.set_defaults(func=cmd_gegenbauer)

    p = sub.add_parser("graph-bound", parents=[common], help="α(H)/|V| for a point file")
    p.add_argument("--points", required=True)
    p.add_argument("--forbid", required=True, help="comma-separated inner products")
    p.add_argument("--tolerance")
    p.set_defaults(func=cmd_graph_bound)

    p = sub.add_parser("mu", parents=[common], help="eigenvalue of the fixed-angle averaging operator")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_mu)
    return parser


_SIGNED_VALUE_FLAGS = ("--t", "--at", "--nu", "--forbid")


def _join_negative_values(argv):
    # argparse reads "-1/2" or "-sqrt(...)" as an option; glue it to its flag
    out, k = [], 0
    while k < len(argv):
        tok = argv[k]
        if tok in _SIGNED_VALUE_FLAGS and k + 1 < len(argv) and argv[k + 1].startswith("-") and not argv[k + 1].startswith("--"):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "circle" and not args.irrational and (args.p is None or args.q is None):
        print("circle: give --p and --q, or --irrational", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
