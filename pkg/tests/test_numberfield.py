import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _numeric import numeric_sign
from oagfork.errors import ConfigurationError
from oagfork.numberfield import (
    FieldSpec,
    count_roots,
    nf_sign,
    poly_divmod,
    poly_gcd,
    poly_mul,
    poly_trim,
    theta_enclosure,
)

SQRT2 = FieldSpec.make([-2, 0, 1], (1, 2))
# theta = sqrt(2) + sqrt(3), hosting both sqrt(2) and sqrt(3)
SQRT23 = FieldSpec.make([1, 0, -10, 0, 1], (3, 4))
# squarefree but reducible: (x^2 - 2)(x^2 - 3), isolated around sqrt(2)
REDUCIBLE = FieldSpec.make([6, 0, -5, 0, 1], (Fraction(7, 5), Fraction(3, 2)))


def test_sqrt2_minus_one_positive():
    e = SQRT2.theta() - 1
    assert nf_sign(e, SQRT2) == 1


def test_two_sqrt6_positive():
    # theta^2 - 5 = 2*sqrt(6) in Q(sqrt(2)+sqrt(3)); oracle: 50-digit numerics
    e = SQRT23.theta() * SQRT23.theta() - 5
    assert numeric_sign(e) == 1
    assert nf_sign(e, SQRT23) == 1


def test_zero_element():
    assert nf_sign(SQRT2.zero(), SQRT2) == 0


def test_reducible_modulus_zero_detection():
    # x^2 - 2 is nonzero mod the presenting polynomial but vanishes at theta
    e = REDUCIBLE.element([-2, 0, 1])
    assert e.coeffs != ()
    assert nf_sign(e, REDUCIBLE) == 0
    # x^2 - 3 does not vanish there
    f = REDUCIBLE.element([-3, 0, 1])
    assert nf_sign(f, REDUCIBLE) == -1


def test_inverse_in_reducible_modulus():
    f = REDUCIBLE.element([-3, 0, 1])  # value -1 at sqrt(2)
    inv = f.inverse()
    assert (f * inv - 1).is_zero()


def test_inverse_roundtrip_sqrt23():
    e = SQRT23.element([1, 2, 0, Fraction(1, 3)])
    assert (e * e.inverse() - 1).is_zero()
    with pytest.raises(ZeroDivisionError):
        SQRT23.zero().inverse()


def test_spec_validation_errors():
    with pytest.raises(ConfigurationError):
        FieldSpec.make([-2, 0, 2], (1, 2))  # not monic
    with pytest.raises(ConfigurationError):
        FieldSpec.make([0, 0, 1], (-1, 1))  # x^2 not squarefree
    with pytest.raises(ConfigurationError):
        FieldSpec.make([-2, 0, 1], (2, 1))  # reversed interval
    with pytest.raises(ConfigurationError):
        FieldSpec.make([-2, 0, 1], (-2, 2))  # two roots inside
    with pytest.raises(ConfigurationError):
        FieldSpec.make([-4, 0, 1], (0, 2))  # endpoint is a root


def test_exact_rational_root_hit_by_bisection():
    # theta = 1/2; the first midpoint of [0, 1] is the root itself
    spec = FieldSpec.make([Fraction(-1, 2), 1], (0, 1))
    assert nf_sign(spec.theta() - Fraction(1, 2), spec) == 0
    assert nf_sign(spec.theta() - Fraction(1, 3), spec) == 1


def test_theta_enclosure_width():
    lo, hi = theta_enclosure(SQRT23, Fraction(1, 10**12))
    assert hi - lo <= Fraction(1, 10**12)
    assert lo * lo <= 10 and hi >= 3  # crude sanity: theta ~ 3.146


def _random_element(rng, spec, height=100):
    coeffs = [
        Fraction(rng.randint(-height, height), rng.randint(1, height))
        for _ in range(spec.degree)
    ]
    return spec.element(coeffs)


def test_sign_antisymmetry_and_positivity_random():
    rng = random.Random(7)
    for _ in range(120):
        spec = rng.choice([SQRT2, SQRT23, REDUCIBLE])
        a, b = _random_element(rng, spec), _random_element(rng, spec)
        assert nf_sign(a, spec) == -nf_sign(-a, spec)
        if nf_sign(a, spec) == 1 and nf_sign(b, spec) == 1:
            assert nf_sign(a + b, spec) == 1
            assert nf_sign(a * b, spec) == 1


def test_agreement_with_numerics_random():
    rng = random.Random(11)
    for _ in range(150):
        spec = rng.choice([SQRT2, SQRT23])
        e = _random_element(rng, spec)
        num = numeric_sign(e)
        if num is not None:
            assert nf_sign(e, spec) == num


def test_planted_zeros_detected():
    rng = random.Random(13)
    for _ in range(40):
        spec = rng.choice([SQRT2, SQRT23, REDUCIBLE])
        mult = poly_trim(
            [Fraction(rng.randint(-5, 5)) for _ in range(rng.randint(1, 3))]
        )
        e = spec.element(poly_mul(mult, spec.minpoly))
        assert nf_sign(e, spec) == 0


@given(
    st.lists(
        st.fractions(min_value=-30, max_value=30, max_denominator=12),
        min_size=0,
        max_size=3,
    )
)
@settings(max_examples=60, deadline=None)
def test_arithmetic_consistency(coeffs):
    e = SQRT23.element(coeffs)
    assert ((e + e) - e.scale(2)).is_zero()
    assert (e * SQRT23.one() - e).is_zero()
    assert (e - e).is_zero()


def test_polynomial_helpers():
    p = poly_trim([1, 2, 1])  # (x+1)^2
    q = poly_trim([1, 1])
    quo, rem = poly_divmod(p, q)
    assert quo == q and rem == ()
    assert poly_gcd(p, q) == q
    assert count_roots(poly_trim([-2, 0, 1]), Fraction(0), Fraction(3)) == 1
    assert count_roots(poly_trim([-2, 0, 1]), Fraction(-3), Fraction(3)) == 2
