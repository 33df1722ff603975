import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cusplab.errors import DomainError, SpecSyntaxError
from cusplab.reals import (
    DecimalSpec,
    QuadraticSpec,
    RandomSpec,
    RationalSpec,
    check_unit_interval,
    digits_for_terms,
    parse_real,
)


def test_parse_forms():
    assert parse_real("rat:4/14") == RationalSpec(2, 7)
    assert parse_real("quad:-1,1,5,2") == QuadraticSpec(-1, 1, 5, 2)
    assert parse_real("golden") == QuadraticSpec(-1, 1, 5, 2)
    assert parse_real("silver") == QuadraticSpec(-1, 1, 2)
    assert parse_real("dec:0.414213") == DecimalSpec("414213")
    assert parse_real("rand:7:200") == RandomSpec(7, 200)


@pytest.mark.parametrize("bad", ["rat:1/0", "quad:1,1,4", "quad:1,0,5", "dec:1.5", "rand:x:3", "pi", ""])
def test_parse_rejects(bad):
    with pytest.raises(SpecSyntaxError):
        parse_real(bad)


def test_text_round_trip():
    for s in ["rat:2/7", "quad:-1,1,5,2", "quad:-1,1,2", "dec:0.414213", "rand:7:200"]:
        assert parse_real(s).text == s


def test_unit_interval_check():
    check_unit_interval(parse_real("rat:1/3"))
    for s in ["rat:4/3", "rat:0/1", "quad:1,1,2"]:
        spec = parse_real(s)
        if isinstance(spec, QuadraticSpec):
            # quadratic specs are reduced into (0, 1) by construction
            check_unit_interval(spec)
        else:
            with pytest.raises(DomainError):
                check_unit_interval(spec)


def test_quadratic_reduction_matches_mpmath():
    mpmath.mp.dps = 40
    for spec, value in [
        ("golden", (mpmath.sqrt(5) - 1) / 2),
        ("silver", mpmath.sqrt(2) - 1),
        ("quad:0,1,3", mpmath.sqrt(3) - 1),
        ("quad:7,-3,11,4", mpmath.frac((7 - 3 * mpmath.sqrt(11)) / 4)),
    ]:
        enc = parse_real(spec).enclosure(200)
        assert Fraction(enc.lo, enc.scale) < Fraction(str(value + mpmath.mpf(10) ** -35))
        assert abs(mpmath.mpf(enc.lo) / enc.scale - value) < mpmath.mpf(10) ** -35


def test_decimal_is_half_ulp_interval():
    enc = parse_real("dec:0.414213").enclosure()
    assert Fraction(enc.lo, enc.scale) == Fraction("0.4142125")
    assert Fraction(enc.hi, enc.scale) == Fraction("0.4142135")


@given(st.integers(0, 2**64), st.integers(1, 300), st.integers(1, 300))
@settings(max_examples=50, deadline=None)
def test_random_digits_are_prefix_stable(seed, a, b):
    short, long = sorted((a, b))
    assert RandomSpec(seed, long).digit_string().startswith(RandomSpec(seed, short).digit_string())


@given(st.integers(0, 2**64), st.integers(1, 400))
@settings(max_examples=50, deadline=None)
def test_random_enclosure_contains_longer_draws(seed, digits):
    a = RandomSpec(seed, digits).enclosure()
    b = RandomSpec(seed, digits + 17).enclosure()
    assert Fraction(a.lo, a.scale) <= Fraction(b.lo, b.scale) <= Fraction(b.hi, b.scale) <= Fraction(a.hi, a.scale)


def test_derived_seeds_depend_only_on_master_and_index():
    assert RandomSpec.derive(1, 5, 100) == RandomSpec.derive(1, 5, 100)
    assert RandomSpec.derive(1, 5, 100).seed != RandomSpec.derive(1, 6, 100).seed
    assert RandomSpec.derive(1, 5, 100).seed != RandomSpec.derive(2, 5, 100).seed


def test_precision_sizing_rule():
    assert digits_for_terms(2000) == math.ceil(1.3 * 2000 * (math.pi**2 / (6 * math.log(2)) / math.log(10)) + 64)
    assert 2700 < digits_for_terms(2000) < 3000
