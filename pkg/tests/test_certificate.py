import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_avoid import certificate as C
from sphere_avoid.exact import Sign
from sphere_avoid.lp import cutting_plane_run, make_node

CERT = C.paper_certificate()


def mp_row(cert, i):
    f = lambda q: mpmath.mpf(q.numerator) / q.denominator
    total = f(cert.b1) + f(cert.b0) * mpmath.legendre(i, 0)
    for t in cert.terms:
        c = mpmath.cos(2 * mpmath.pi * t.node.p / t.node.q)
        x = mpmath.sqrt(-c / (1 - c)) * (1 if t.node.sign == "+" else -1)
        total += f(t.multiplier) * mpmath.legendre(i, x)
    return total


def test_paper_certificate_accepted():
    v = C.verify(CERT)
    assert v.accepted, v.reasons
    assert v.objective == Fraction(4694899, 15000000) and v.row0_value == 1
    assert v.tail.passed and v.tail.cutoff == 40


def test_margins_match_50_digit_oracle():
    mpmath.mp.dps = 50
    for m in C.verify_finite(CERT):
        ref = mp_row(CERT, m.i)
        ref_q = Fraction(mpmath.nstr(ref, 45))
        eps = Fraction(1, 10**38)
        assert m.enclosure.lo - eps <= ref_q <= m.enclosure.hi + eps
        if m.i > 0:
            assert m.sign == Sign.POSITIVE


def test_near_tight_rows():
    margins = {m.i: m for m in C.verify_finite(CERT)}
    for i in (1, 2):
        assert 0 < margins[i].enclosure.lo and margins[i].enclosure.hi < Fraction(1, 10**5)


def test_perturbed_b1_rejected():
    v = C.verify(CERT.replace(b1=CERT.b1 - Fraction(1, 10**5)))
    assert not v.accepted
    assert any(m.sign == Sign.NEGATIVE for m in v.margins)


def test_claimed_bound_too_small():
    v = C.verify(CERT.replace(claimed_bound=Fraction(312, 1000)))
    assert not v.accepted and any("exceeds claimed bound" in r for r in v.reasons)


def test_short_cutoff_fails_tail():
    v = C.verify(CERT.replace(cutoff=10))
    assert not v.accepted and not v.tail.passed


def test_negative_multiplier_rejected():
    t0 = CERT.terms[0]
    bad = CERT.replace(terms=(C.Term(t0.node, -t0.multiplier, t0.rhs),) + CERT.terms[1:])
    assert not C.verify(bad).accepted


def test_wrong_rhs_rejected():
    t0 = CERT.terms[0]
    bad = CERT.replace(terms=(C.Term(t0.node, t0.multiplier, Fraction(1, 2)),) + CERT.terms[1:])
    assert not C.verify(bad).accepted


def test_enclosure_only_node_rejected():
    bad = CERT.replace(terms=CERT.terms + (C.Term(make_node(3, 7), Fraction(1, 10**9), Fraction(3, 7)),))
    v = C.verify(bad)
    assert not v.accepted and any("exact" in r for r in v.reasons)


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=0, max_value=Fraction(1, 10), max_denominator=10**6))
def test_loosening_claimed_bound_keeps_acceptance(extra):
    assert C.verify(CERT.replace(claimed_bound=CERT.claimed_bound + extra)).accepted


def test_soundness_of_accepted_verdicts():
    for cert in (CERT, CERT.replace(b1=CERT.b1 + Fraction(1, 10**4), claimed_bound=Fraction(1, 2))):
        v = C.verify(cert)
        if v.accepted:
            assert all(m.sign != Sign.NEGATIVE for m in v.margins)
            assert v.tail.passed and v.row0_value >= 1 and v.objective <= v.claimed_bound


def test_json_round_trip():
    text = C.dumps(CERT)
    back = C.from_json(text)
    assert back == CERT
    data = json.loads(text)
    assert data["b1"] == "64307/500000"  # 128614/10^6 reduced


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("b1"),
    lambda d: d.update(b1=0.128),
    lambda d: d.update(cutoff="40"),
    lambda d: d["terms"][0].update(sign="*"),
    lambda d: d["terms"][0].update(p=1, q=5),
])
def test_malformed_json(mutate):
    data = C.to_json(CERT)
    mutate(data)
    with pytest.raises(C.CertificateFormatError):
        C.from_json(json.dumps(data))


def test_not_json():
    with pytest.raises(C.CertificateFormatError):
        C.from_json("{nope")


def test_verification_is_deterministic():
    a, b = C.verify(CERT), C.verify(CERT)
    assert a.margins == b.margins and a.objective == b.objective and a.reasons == b.reasons


def test_tail_threshold():
    assert C.tail_threshold(CERT) == Fraction(128614, 871386)


@pytest.mark.slow
def test_derived_certificate_from_cutting_plane_run():
    trace = cutting_plane_run(40, 5, 10)
    cert = C.certificate_from_solution(trace.lp, trace.solution)
    assert cert.cutoff == 41
    assert all(t.multiplier > 0 for t in cert.terms)
    v = C.verify(cert)
    assert v.accepted, v.reasons
    assert v.objective <= Fraction(4694899, 15000000)
