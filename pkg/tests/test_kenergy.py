import numpy as np
import pytest

from admkahler.classify import counterexample_setup
from admkahler.exactpoly import rational
from admkahler.extremal import extremal_polynomial, theta_profile
from admkahler.kenergy import (
    NonpositiveU,
    NotBoundedBelow,
    bump_polynomial,
    canonical_grid,
    destabilize,
    energy,
    minimize,
    most_negative_point,
)
from admkahler.setup import AdmissibleSetup

q = rational


def test_canonical_grid_values():
    g = canonical_grid(64)
    z = g.z
    assert np.allclose(g.U, 1 / (1 - z * z), rtol=1e-15)
    assert np.isclose(float(g.weights.sum()), 2.0)
    assert np.allclose(z, -z[::-1])
    assert 1 / (1 - (1 - 1e-3) ** 2) == pytest.approx(500.25, rel=1e-3)


def test_grid_too_small():
    with pytest.raises(ValueError):
        canonical_grid(8)


def test_trivial_canonical_is_stationary(trivial):
    e = energy(trivial, canonical_grid(64))
    assert np.max(np.abs(e.gradient)) < 1e-13


def test_koiso_sakane_stationary(koiso_sakane):
    res = minimize(koiso_sakane, canonical_grid(64))
    e = energy(koiso_sakane, res.grid)
    assert np.linalg.norm(e.gradient) < 1e-10
    assert energy(koiso_sakane, canonical_grid(64)).value > e.value
    th = theta_profile(extremal_polynomial(koiso_sakane), koiso_sakane)
    for t, U in zip(res.grid.nodes, res.grid.U):
        assert 1 / U == pytest.approx(float(th(t)), rel=1e-12)


def test_minimizer_sphere_factor():
    s = AdmissibleSetup.of(0, 0, [(1, "1/2", 2)])
    res = minimize(s, canonical_grid(32))
    assert res.sup_diff < 1e-8
    th = theta_profile(extremal_polynomial(s), s)
    assert np.allclose(1 / res.descent, [float(th(t)) for t in res.grid.nodes], rtol=1e-9)


def test_gradient_matches_finite_differences(koiso_sakane):
    g = canonical_grid(64)
    e = energy(koiso_sakane, g)
    rng = np.random.default_rng(1)
    direction = rng.standard_normal(len(g.nodes))
    h = 1e-6
    up = energy(koiso_sakane, g.with_U(g.U + h * direction)).value
    dn = energy(koiso_sakane, g.with_U(g.U - h * direction)).value
    fd = (up - dn) / (2 * h)
    exact = float(e.gradient @ direction)
    assert abs(fd - exact) <= 1e-6 * abs(exact)


def test_nonpositive_U(trivial):
    g = canonical_grid(16)
    U = g.U.copy()
    U[3] = 0.0
    with pytest.raises(NonpositiveU):
        energy(trivial, g.with_U(U))


def test_unbounded_when_F_negative(genus2_unstable):
    with pytest.raises(NotBoundedBelow):
        minimize(genus2_unstable, canonical_grid(64))


def test_bump_mass():
    b, mass = bump_polynomial("1/4", "1/5")
    assert b.integrate(q("1/20"), q("9/20")) == mass == 16 * q("1/5") ** 5 / 15


def test_destabilize_genus2(genus2_unstable):
    F = extremal_polynomial(genus2_unstable).F
    center, value = most_negative_point(F)
    assert value < 0
    r = destabilize(genus2_unstable, center, "1/10", 100)
    assert r.linear_coefficient < 0
    assert r.decreasing
    lin = float(r.linear_coefficient)
    assert all(e <= k * lin / 2 for k, e in zip(r.ks, r.energies))


def test_destabilize_koiso_sakane_increases(koiso_sakane):
    r = destabilize(koiso_sakane, "1/5", "1/2", 40)
    assert r.increasing and r.linear_coefficient > 0


def test_double_root_linear_term_vanishes():
    setup, _ = counterexample_setup("9/10", "1/2", 2)
    root = q("2071/5000")
    lins = [destabilize(setup, root, w, 5).linear_coefficient for w in ("1/10", "1/100", "1/1000")]
    assert all(v > 0 for v in lins)
    assert lins[0] > 50 * lins[1] > 2500 * lins[2]


def test_bad_bump():
    with pytest.raises(ValueError):
        destabilize(AdmissibleSetup(), "9/10", "1/5", 3)
