import random

import pytest

from admkahler.appendix import (
    asymptotic_AB,
    asymptotic_remainders,
    beta_moment_integral,
    identity_suite,
    order2_pair,
    order2_polynomials,
    order2_scan,
    region_infeasible,
)
from admkahler.exactpoly import rational
from admkahler.extremal import extremal_polynomial
from admkahler.setup import AdmissibleSetup, random_setup

q = rational


@pytest.mark.parametrize("m, n, k, value", [(0, 0, 0, 2), (1, 1, 0, q("4/3")), (1, 0, 1, q("2/3")), (2, 2, 1, 0)])
def test_beta_integrals(m, n, k, value):
    assert beta_moment_integral(m, n, k) == value


def test_beta_integral_rejects_negative():
    with pytest.raises(ValueError):
        beta_moment_integral(-1, 0, 0)


def test_identity_suite():
    rep = identity_suite(10)
    assert rep.passed
    assert rep.checked["closed-vs-integral"] == 11 * 11 * 3
    assert rep.checked["k0"] == 100


def test_identity_worked_case():
    I = beta_moment_integral
    assert I(0, 1, 0) + I(1, 0, 0) == 4 == I(1, 1, 0) * 3 * 2 / 2


def test_asymptotics_single_factor():
    s = AdmissibleSetup.of(0, 0, [(1, "1/100", 3)])
    a = asymptotic_AB(s)
    assert a.A == q("-4/100")
    assert a.B == -2 - 2 * 3 * q("1/100")
    sol = extremal_polynomial(s)
    assert abs(sol.A - a.A) < q("1/1000") and abs(sol.B - a.B) < q("1/1000")


def test_asymptotic_sign_change():
    plus = AdmissibleSetup.of(0, 0, [(1, "1/10", 1), (1, "-1/20", 1)])
    minus = AdmissibleSetup.of(0, 0, [(1, "1/20", 1), (1, "-1/10", 1)])
    assert asymptotic_AB(plus).A < 0 < asymptotic_AB(minus).A


def test_remainder_ratio():
    rng = random.Random(11)
    for _ in range(10):
        s = random_setup(rng)
        a1, b1 = asymptotic_remainders(s, q("1/512"))
        a2, b2 = asymptotic_remainders(s, q("1/1024"))
        if a2:
            assert float(a1 / a2) == pytest.approx(4, abs=0.5)
        if b2:
            assert float(b1 / b2) == pytest.approx(4, abs=0.5)


def test_order2_relations_consistent():
    Np, Dp, Nm, Dm, P = order2_polynomials(3, -2)
    # beta = N+/D+ = N-/D- at each root of P
    assert P == Np * Dm - Nm * Dp


def test_order2_small_scan():
    scan = order2_scan(10)
    assert scan.hits == [] and scan.region_infeasible
    assert scan.pairs == 20 * 20


def test_order2_degenerate_pair():
    # q+ = q- = 1: the relations coincide; no admissible point either
    assert order2_polynomials(1, 1)[-1].is_zero()
    assert order2_pair(1, 1) == []


def test_region_check():
    assert region_infeasible(50)
    assert not (2 * 1 - (-1) < 1)


def test_scan_rejects_R():
    with pytest.raises(ValueError):
        order2_scan(0)


def test_order2_eliminant_vanishes_at_unit():
    for qp, qm in ((3, -2), (5, 7), (-4, 9)):
        P = order2_polynomials(qp, qm)[-1]
        assert P(1) == 0 and P(-1) == 0


@pytest.mark.parametrize("qp, qm, eta", [("1/10", "-1/2", "4/3"), ("-1/2", "1/10", "-4/3")])
def test_order2_finds_fractional_solutions(qp, qm, eta):
    # inside the sign region 2q+ - q- < 1, which integers cannot reach
    (hit,) = order2_pair(q(qp), q(qm))
    assert hit.eta == (q(eta), q(eta))
    Np, Dp, Nm, Dm, _ = order2_polynomials(q(qp), q(qm))
    beta = Np(q(eta)) / Dp(q(eta))
    assert abs(beta) < 1 and beta == Nm(q(eta)) / Dm(q(eta))


def test_order2_fractional_outside_region():
    assert order2_pair(q("1/10"), -2) == []
