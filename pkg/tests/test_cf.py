import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cusplab.cf import (
    Kind,
    cf_expand,
    convergent_table,
    convergent_thetas,
    convergents,
    depth_parameter,
    n_convergents,
    product_below,
    sandwich_check,
    theta,
)
from cusplab.errors import DomainError, PrecisionExhausted, RationalInputError
from cusplab.reals import RandomSpec, parse_real

from oracles import exact_theta, quadratic_value, scan_n_convergents, stern_brocot_all, truncated_enclosure


# ------------------------------------------------------------ expansion


def test_rational_expansion_terminates():
    cf = cf_expand("rat:2/7", 10)
    assert cf.digits == (3, 2)
    assert cf.terminated and cf.exact


def test_golden_expansion_is_all_ones():
    cf = cf_expand("golden", 200)
    assert set(cf.digits) == {1}
    assert cf.exact and cf.period == (0, 1)


def test_quadratic_expansions_are_periodic():
    assert cf_expand("silver", 30).digits == (2,) * 30
    assert cf_expand("quad:0,1,3", 8).digits == (1, 2) * 4
    cf = cf_expand("quad:0,1,7", 12)
    pre, per = cf.period
    assert cf.digits[pre : pre + per] == cf.digits[pre + per : pre + 2 * per]


def test_decimal_certifies_only_shared_prefix():
    # Oracle: expansions of both ends of the rounding interval agree on 7 digits.
    lo, hi = Fraction("0.4142125"), Fraction("0.4142135")

    def expand(v, n=12):
        out = []
        for _ in range(n):
            if v == 0:
                break
            v = 1 / v
            a = math.floor(v)
            out.append(a)
            v -= a
        return out

    shared = 0
    for a, b in zip(expand(lo), expand(hi)):
        if a != b:
            break
        shared += 1
    assert shared == 7
    assert cf_expand("dec:0.414213", 7).digits == tuple(expand(lo)[:7])
    with pytest.raises(PrecisionExhausted) as info:
        cf_expand("dec:0.414213", 8)
    assert info.value.certified == 7


@pytest.mark.parametrize("bad", ["rat:3/2", "rat:1/1", "rat:0/5"])
def test_expansion_rejects_outside_unit_interval(bad):
    with pytest.raises(DomainError):
        cf_expand(bad, 3)


def test_expansion_needs_positive_count():
    with pytest.raises(DomainError):
        cf_expand("golden", 0)


@given(st.integers(0, 2**63), st.integers(30, 200))
@settings(max_examples=30, deadline=None)
def test_certified_digits_survive_more_precision(seed, digits):
    short = RandomSpec(seed, digits)
    long = RandomSpec(seed, 2 * digits)
    try:
        a = cf_expand(short, 10**6)
    except PrecisionExhausted as exc:
        a = cf_expand(short, exc.certified) if exc.certified else None
    if a is None:
        return
    b = cf_expand(long, len(a))
    assert b.digits == a.digits


def test_random_expansion_matches_exact_fraction():
    x = RandomSpec(3, 300)
    m = int(x.digit_string())
    lo, hi = Fraction(m, 10**300), Fraction(m + 1, 10**300)
    cf = cf_expand(x, 150)
    for v in (lo, hi):
        P, Q = convergent_table(cf.digits)
        # every certified convergent is a convergent of both interval ends
        assert all(abs(v - Fraction(p, q)) < Fraction(1, q * q) for p, q in zip(P[2:], Q[2:]))


# ------------------------------------------------------------ convergents


def test_convergent_examples():
    cf = cf_expand("golden", 5)
    assert [(r.p, r.q) for r in convergents(cf)] == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]
    assert [(r.p, r.q) for r in convergents(cf_expand("rat:2/7", 5))] == [(1, 3), (2, 7)]


def test_determinant_identity_on_random_inputs():
    for i in range(100):
        cf = cf_expand(RandomSpec.derive(99, i, 3000), 2000)
        P, Q = convergent_table(cf.digits)
        for n in range(1, 2001):
            assert P[n + 1] * Q[n] - P[n] * Q[n + 1] == (-1) ** (n + 1)
        assert all(Q[n + 1] > Q[n] for n in range(2, 2001))


# ------------------------------------------------------------ theta and t


def test_theta_golden():
    val = theta("golden", (5, 8))
    # exact: 8 |8x - 5| = 72 - 32 sqrt 5
    assert val.value == pytest.approx(0.44582472000672971, abs=1e-12)
    assert val.error < 1e-9


def test_theta_exact_hit_is_zero():
    assert theta("rat:1/2", (1, 2)).value == 0.0


def test_theta_silver_limit():
    thetas = convergent_thetas("silver", 40)
    assert thetas[-1] == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-12)
    assert theta("silver", (408, 985)).value == pytest.approx(0.35355343614372362, abs=1e-12)


def test_golden_thetas_approach_inverse_sqrt5():
    assert convergent_thetas("golden", 60)[-1] == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_depth_parameter_examples():
    # |x - p/q| = 2 e^-5 gives t = 5; an exact hit has no finite t
    x = Fraction(1, 3) + 2 * Fraction(mpmath.nstr(mpmath.exp(-5), 30))
    spec = parse_real(f"rat:{x.numerator}/{x.denominator}")
    assert depth_parameter(spec, (1, 3)) == pytest.approx(5.0, abs=1e-12)
    with pytest.raises(RationalInputError):
        depth_parameter("rat:1/3", (1, 3))


def test_depth_parameter_zero_at_start_height():
    # x = 1/2 and p/q = 5/2 are 2 apart
    assert depth_parameter("rat:1/2", (5, 2)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        depth_parameter("rat:1/2", (7, 2))


def test_gap_formula_over_2000_events():
    x = RandomSpec(11, 3000)
    recs = n_convergents(x, 1500)
    assert len(recs) >= 2000
    lo, hi, s = truncated_enclosure(x, 2900)
    with mpmath.workdps(3000):
        xv = mpmath.mpf(lo) / s
        for a, b in zip(recs[:2000], recs[1:2001]):
            ref = mpmath.log(abs(xv - mpmath.mpf(a.p) / a.q) / abs(xv - mpmath.mpf(b.p) / b.q))
            assert b.t - a.t == pytest.approx(float(ref), abs=1e-9)


def test_product_below_is_exact():
    for a, b, c in [(3, 5, 16), (3, 5, 15), (10**40, 10**40, 10**80), (10**40, 10**40 + 1, 10**80 + 10**40)]:
        assert product_below(a, b, c) == (a * b < c)


@given(st.integers(1, 2**200), st.integers(1, 2**200), st.integers(1, 2**400))
@settings(max_examples=200, deadline=None)
def test_product_below_property(a, b, c):
    assert product_below(a, b, c) == (a * b < c)
    assert product_below(a, b, a * b) is False
    assert product_below(a, b, a * b + 1) is True


# ------------------------------------------------------------ n-convergents


def test_golden_n_convergents_are_the_convergents():
    recs = n_convergents("golden", 30)
    assert all(r.kind == Kind.CONVERGENT for r in recs if not r.seed)
    got = {(r.p, r.q) for r in recs if r.q <= 10**4}
    assert got == scan_n_convergents("golden", 10**4)


def test_sqrt3_has_nonclassical_records():
    recs = n_convergents("quad:0,1,3", 30)
    assert any(r.kind == Kind.NONCLASSICAL for r in recs)
    got = {(r.p, r.q) for r in recs if r.q <= 10**4}
    assert got == scan_n_convergents("quad:0,1,3", 10**4)


def test_per_denominator_scan_agrees_with_full_stern_brocot_enumeration():
    for spec in ["rand:5:80", "silver", "quad:0,1,3"]:
        lo, hi, s = truncated_enclosure(spec)
        brute = {
            (p, q)
            for p, q in stern_brocot_all(300)
            if q * abs(q * lo - p * s) < s and q * abs(q * hi - p * s) < s
        }
        assert brute == scan_n_convergents(spec, 300)


@given(st.integers(0, 2**63))
@settings(max_examples=15, deadline=None)
def test_n_convergents_match_oracle_property(seed):
    x = RandomSpec(seed, 400)
    recs = n_convergents(x, 60)
    assert {(r.p, r.q) for r in recs if r.q <= 2000} == scan_n_convergents(x, 2000)


@given(st.integers(0, 2**63))
@settings(max_examples=20, deadline=None)
def test_record_invariants(seed):
    x = RandomSpec(seed, 600)
    recs = n_convergents(x, 200)
    lo, hi, s = truncated_enclosure(x, 500)
    xv = Fraction(lo, s)
    ts = [r.t for r in recs]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    for r in recs[:50]:
        assert r.theta < 1 and r.depth == 2 * r.theta
        assert r.theta == pytest.approx(float(exact_theta(xv, r.p, r.q)), rel=1e-12)
    conv = [(r.p, r.q) for r in recs if r.kind == Kind.CONVERGENT and not r.seed]
    P, Q = convergent_table(cf_expand(x, 200).digits)
    assert conv == list(zip(P[2:], Q[2:]))


def test_seed_record_kind():
    # a_1 >= 2: 0/1 is a classical approximant; a_1 = 1: it is not
    def seed_kind(x):
        (rec,) = [r for r in n_convergents(x, 20) if r.seed]
        assert (rec.p, rec.q) == (0, 1)
        return rec.kind

    assert seed_kind("silver") == Kind.CONVERGENT
    assert seed_kind("golden") == Kind.NONCLASSICAL


def test_n_convergents_reject_rationals():
    with pytest.raises(RationalInputError):
        n_convergents("rat:2/7", 3)


# ------------------------------------------------------------ sandwich bound


def test_provable_sandwich_holds_on_random_inputs():
    for i in range(10):
        assert sandwich_check(RandomSpec.derive(5, i, 3000), 2000, lower_offset=0) == []


def test_stated_sandwich_fails_for_silver():
    # 1/theta_n -> 2 sqrt 2 < a_{n+1} + 1 = 3
    assert 1 / quadratic_value("silver") > 0  # sanity of the oracle import
    assert sandwich_check("silver", 20) == list(range(1, 21))


def test_sandwich_identity_against_exact_arithmetic():
    x = RandomSpec(21, 200)
    lo, _, s = truncated_enclosure(x, 190)
    xv = Fraction(lo, s)
    cf = cf_expand(x, 60)
    P, Q = convergent_table(cf.digits)
    stated_fail = []
    for n in range(1, 60):
        inv = 1 / exact_theta(xv, P[n + 1], Q[n + 1])
        a = cf.digits[n]
        assert a < inv < a + 2
        if not a + 1 < inv:
            stated_fail.append(n)
    assert sandwich_check(x, 59) == stated_fail


def test_near_ties_are_ordered_exactly():
    # 2744210/6625109 and 3880899/9369319 differ in distance to silver by a relative 6e-15
    recs = n_convergents("silver", 30)
    lo, _, s = truncated_enclosure("silver", 200)
    xv = Fraction(lo, s)
    dists = [abs(xv - Fraction(r.p, r.q)) for r in recs]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    assert {(2744210, 6625109), (3880899, 9369319)} <= {(r.p, r.q) for r in recs}
