import random

import pytest

from admkahler.classify import (
    ConstraintViolated,
    VerdictKind,
    boundary_factor,
    classify,
    counterexample_setup,
    csc_locus_scan,
    csc_scalar_parameter,
    csc_system_residuals,
    hodge4_coefficients,
    nonneg_base_fastpath,
    quadratic_disc_is_square,
    rscase_obstruction,
    ruled_surface_c,
    ruled_surface_c_at_minus_one,
    ruled_surface_c_at_one,
    ruled_surface_threshold,
    two_factor_setup,
    zero_scalar_intersection,
)
from admkahler.exactpoly import RatPoly, rational, rational_root_in
from admkahler.extremal import extremal_polynomial
from admkahler.setup import AdmissibleSetup, random_rational_in, random_setup

q = rational


def test_koiso_sakane_is_csc(koiso_sakane):
    v = classify(koiso_sakane)
    assert v.kind is VerdictKind.EXTREMAL_CSC
    assert v.witness.count == 0
    rec = v.to_record()
    assert rec["kind"] == "ExtremalCSC" and rec["futaki"] == "0"


def test_sphere_factor_is_extremal_non_csc():
    v = classify(AdmissibleSetup.of(0, 0, [(1, "1/2", 2)]))
    assert v.kind is VerdictKind.EXTREMAL_NON_CSC


def test_genus2_unstable(genus2_unstable):
    v = classify(genus2_unstable)
    assert v.kind is VerdictKind.NO_EXTREMAL_SIGN_CHANGE
    assert v.witness.has_odd_root()


def test_genus2_mild_class_is_still_extremal():
    assert classify(AdmissibleSetup.of(0, 0, [(1, "9/10", -2)])).exists


def test_quotient_times_boundary_is_F(rng):
    for _ in range(50):
        s = random_setup(rng)
        v = classify(s)
        assert v.quotient * boundary_factor(s.d0, s.dinf) == v.solution.F


def test_ruled_c_example():
    assert ruled_surface_c(0, 0, 2, "1/2", verify=True) == q("-1/22")
    assert q("-1/22") == q("-12/11") * q("1/2") / 12


def test_ruled_c_random_oracle():
    rng = random.Random(3)
    for _ in range(200):
        d0, di = rng.randint(0, 3), rng.randint(0, 3)
        x = random_rational_in(rng, -1, 1)
        if x == 0:
            continue
        s = random_rational_in(rng, -6, 6, 12)
        if s * x >= 2:
            continue
        c = ruled_surface_c(d0, di, s, x, verify=True)
        assert c < 0


@pytest.mark.parametrize("d0, di, s", [(0, 0, 1), (1, 2, "-3/2"), (2, 0, 5)])
def test_ruled_c_boundary_values(d0, di, s):
    assert ruled_surface_c(d0, di, s, 1) == ruled_surface_c_at_one(d0, s)
    assert ruled_surface_c(d0, di, s, -1) == ruled_surface_c_at_minus_one(di, s)


def test_ruled_threshold_matches_classifier():
    (iv,) = ruled_surface_threshold(0, 0, -3)
    below, above = iv.lo - q("1/100"), iv.hi + q("1/100")
    assert classify(AdmissibleSetup.of(0, 0, [(1, below, -3)])).exists
    assert not classify(AdmissibleSetup.of(0, 0, [(1, above, -3)])).exists
    assert ruled_surface_threshold(0, 0, 0) == []


def test_hodge4_random_oracle():
    rng = random.Random(4)
    for _ in range(100):
        d0, di = rng.randint(0, 2), rng.randint(0, 2)
        x = random_rational_in(rng, -1, 1)
        if x == 0:
            continue
        s = random_rational_in(rng, -6, 6, 12)
        if s * x >= 3:
            continue
        c, e, n, d = hodge4_coefficients(d0, di, s, x, verify=True)
        assert n != 0 and d > 0
        assert extremal_polynomial(AdmissibleSetup.of(d0, di, [(2, x, s)])).futaki != 0


def test_ruled_classes_never_csc():
    rng = random.Random(5)
    for _ in range(200):
        x = random_rational_in(rng, 0, 1)
        qq = rng.randint(1, 6) * rng.choice((1, -1))
        x = x if qq > 0 else -x
        p = rng.choice((2, 0, -2, -4, -6))
        s = q(p) / qq
        sol = extremal_polynomial(AdmissibleSetup.of(rng.randint(0, 2), rng.randint(0, 2), [(1, x, s, p, qq)]))
        assert sol.futaki != 0


def test_product_surfaces_never_csc():
    rng = random.Random(6)
    checked = 0
    while checked < 200:
        sign = rng.choice((1, -1))
        x1, x2 = sign * random_rational_in(rng, 0, 1), sign * random_rational_in(rng, 0, 1)
        if x1 == x2:
            continue
        q1, q2 = sign * rng.randint(1, 5), sign * rng.randint(1, 5)
        s1, s2 = q(rng.choice((2, 0, -2, -4))) / q1, q(rng.choice((2, 0, -2, -4))) / q2
        if s1 * x1 >= 2 or s2 * x2 >= 2:
            continue
        s = csc_scalar_parameter(x1, x2, s1)
        assert csc_system_residuals(x1, x2, s, s1, s2)[2] != 0
        checked += 1


def test_koiso_sakane_residuals():
    assert csc_scalar_parameter("1/2", "-1/2", 2) == 1
    assert csc_system_residuals("1/2", "-1/2", 1, 2, -2) == (0, 0, 0)


def test_off_locus_residual_nonzero():
    r = csc_system_residuals("1/3", "-1/5", "1/2", 2, -2)
    assert any(r)


def test_csc_locus_two_branches():
    pts = csc_locus_scan(2, -2, grid=20)
    anti = [p for p in pts if p.x1 + p.x2 == 0]
    shift = [p for p in pts if p.x1 == p.x2 + 1]
    assert anti and shift
    # the branches cross at (1/2, -1/2); nothing lies off them
    assert all(p.x1 + p.x2 == 0 or p.x1 == p.x2 + 1 for p in pts)
    assert all(p.exact for p in pts)
    assert all(p.kind is VerdictKind.EXTREMAL_CSC for p in pts if p.s >= 0)


def test_csc_locus_q2_single_branch():
    pts = csc_locus_scan(1, -1, grid=20)
    assert pts and all(p.x1 + p.x2 == 0 for p in pts)


def test_csc_locus_tori():
    pts = csc_locus_scan(0, 0, grid=10)
    anti = [p for p in pts if p.x1 + p.x2 == 0]
    assert anti
    for p in anti:
        assert p.s == (1 - p.x1**2) / (3 - p.x1**2) > 0
        assert classify(two_factor_setup(p.x1, p.x2, 0, 0)).kind is VerdictKind.EXTREMAL_CSC


@pytest.mark.parametrize("s1, s2", [(0, 1), (-2, 2)])
def test_zero_scalar_intersection_exists(s1, s2):
    pt = zero_scalar_intersection(s1, s2)
    assert 0 < abs(pt.x1) < 1 and 0 < abs(pt.x2) < 1
    assert abs(float(pt.r1)) < 1e-9 and abs(float(pt.r2)) < 1e-9
    assert pt.x1_hi - pt.x1_lo <= q("1/1000000000000")


def test_zero_scalar_needs_hypotheses():
    with pytest.raises(ValueError):
        zero_scalar_intersection(1, 1)


@pytest.mark.parametrize(
    "genus, degrees, expected",
    [(0, [0, 1], True), (3, [0, 2], False), (2, [0, 2], True), (0, [1, 1], False), (1, [2, 5], True)],
)
def test_rscase(genus, degrees, expected):
    assert rscase_obstruction(genus, degrees) is expected


def test_counterexample_half_quarter_data():
    setup, cert = counterexample_setup("1/2", "1/4", 2, require_negative=False)
    assert cert.x3 == q("-2/3")
    assert cert.mu == q("5/32")
    assert cert.target == RatPoly((1, 0, -1)) * RatPoly((-1, 2, 1)) ** 2 * q("5/32")
    assert cert.verdict.kind is VerdictKind.NO_EXTREMAL_DOUBLE_ROOT
    assert cert.irrational_double_root
    iv = cert.double_root_interval()
    assert iv.lo < 2**0.5 - 1 < iv.hi
    # the sign condition on every factor does not hold at this point
    assert not cert.negative_curvature
    with pytest.raises(ConstraintViolated):
        counterexample_setup("1/2", "1/4", 2)


def test_counterexample_valid_point():
    setup, cert = counterexample_setup("9/10", "1/2", 2)
    assert cert.negative_curvature
    assert all(f.s * f.x < 0 for f in setup.factors)
    assert cert.verdict.kind is VerdictKind.NO_EXTREMAL_DOUBLE_ROOT and cert.irrational_double_root
    F = cert.verdict.solution.F
    assert all(F(q(k) / 97) > 0 for k in range(-96, 97))


def test_counterexample_rational_root():
    # r = 3/2 < 8/5 is rejected; r = 15/4 gives z^2 + rz - 1 = (z - 1/4)(z + 4)
    with pytest.raises(ConstraintViolated):
        counterexample_setup("1/2", "1/4", "3/2")
    assert quadratic_disc_is_square("15/4")
    assert not quadratic_disc_is_square(2)
    _, cert = counterexample_setup("1/2", "1/4", "15/4", require_negative=False)
    assert not cert.irrational_double_root
    iv = cert.double_root_interval()
    assert rational_root_in(cert.verdict.quotient, iv.lo, iv.hi) == q("1/4")


def test_fastpath():
    rng = random.Random(8)
    for _ in range(100):
        assert nonneg_base_fastpath(random_setup(rng, nonnegative=True)).exists
    assert nonneg_base_fastpath(AdmissibleSetup.of(0, 0, [(1, "1/2", -2)])) is None
