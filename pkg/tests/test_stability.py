import random

import pytest
from hypothesis import given, strategies as st

from admkahler.classify import counterexample_setup
from admkahler.exactpoly import RatPoly, rational
from admkahler.extremal import extremal_polynomial
from admkahler.setup import random_setup
from admkahler.stability import (
    OutOfRange,
    identity_holds,
    kernel_integral,
    relative_slope_verdict,
    stability_polynomials,
    stability_report,
    trapezium_check,
    trapezium_deviation,
)

q = rational


def test_kernel_integral_of_constant():
    # int_{-1}^{z} (z - t) dt = (z + 1)^2 / 2
    assert kernel_integral(RatPoly((1,))) == RatPoly((1, 1)) ** 2 * q("1/2")


def test_bare_fibre_at_origin(trivial):
    r = stability_report(trivial, 0)
    assert r.modified == q("-1/8")


def test_koiso_sakane_report(koiso_sakane):
    sp = stability_polynomials(koiso_sakane)
    assert sp.futaki_beta == 0
    for k in range(-99, 100, 7):
        assert stability_report(koiso_sakane, q(k) / 100, sp).modified < 0


def test_out_of_range(trivial):
    with pytest.raises(OutOfRange):
        stability_report(trivial, 1)


@given(st.integers(0, 10**6))
def test_identity_random(seed):
    assert identity_holds(random_setup(random.Random(seed)))


def test_modified_matches_F(koiso_sakane):
    F = extremal_polynomial(koiso_sakane).F
    sp = stability_polynomials(koiso_sakane)
    for z in (q("-3/4"), q("1/9")):
        assert stability_report(koiso_sakane, z, sp).modified == -F(z) / (4 * sp.alpha0)


def test_slope_verdicts(koiso_sakane, genus2_unstable):
    assert relative_slope_verdict(koiso_sakane).kind == "stable"
    v = relative_slope_verdict(genus2_unstable)
    assert v.kind == "unstable" and v.witness
    setup, _ = counterexample_setup("9/10", "1/2", 2)
    v = relative_slope_verdict(setup)
    assert v.kind == "boundary" and v.irrational
    (iv,) = v.witness
    assert iv.lo < 2**0.5 - 1 < iv.hi


def test_trapezium_linear_exact():
    f = RatPoly((0, 1))
    assert all(trapezium_deviation(f, 1, 1, k) == 0 for k in range(1, 30))


def test_trapezium_constant_exact():
    f = RatPoly((1,))
    for eps in (0, 1):
        assert trapezium_check(f, 2, eps, 20).max_deviation == 0


def test_trapezium_quadratic_bounded():
    res = trapezium_check(RatPoly((0, 0, 1)), 1, 1, 40)
    assert res.limit == q("1/6")
    assert res.bounded
    # sum (i/k)^2 - k/3 - 1/2 = 1/(6k) exactly
    assert all(v == q("1/6") for _, v in res.scaled)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5), st.sampled_from([0, 1]))
def test_trapezium_tends_to_euler_maclaurin(cs, eps):
    f = RatPoly(cs)
    res = trapezium_check(f, 1, eps, 32)
    assert res.bounded
    k, v = res.scaled[-1]
    # the next Euler-Maclaurin term is O(1/k^2) after scaling by k
    assert abs(v - res.limit) <= q(sum(abs(c) for c in cs)) / (k * k)
