"""Extremal polynomial, moments, Futaki invariant and curvature profiles.

For a setup with momentum weight ``p_c`` the extremal polynomial ``F`` solves

    F''(z) = (A z + B + sum_a 2 d_a s_a x_a / (1 + x_a z)) p_c(z),  F(-1) = F(1) = 0,

where ``(A, B)`` solve the 2x2 moment system.  Two independent
constructions are run and compared coefficientwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .exactpoly import ONE, ZERO, RatFunc, RatPoly, Rational, rational
from .setup import AdmissibleSetup, momentum_weight


class SingularSystem(ArithmeticError):
    pass


class InternalMismatch(AssertionError):
    """Two constructions that must agree did not: an implementation bug."""


class PoleAtQuery(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Moments:
    alpha0: Rational
    alpha1: Rational
    alpha2: Rational
    beta0: Rational
    beta1: Rational

    @property
    def gram(self) -> Rational:
        """``alpha0 alpha2 - alpha1^2`` (positive)."""
        return self.alpha0 * self.alpha2 - self.alpha1 * self.alpha1


@dataclass(frozen=True)
class ExtremalSolution:
    moments: Moments
    A: Rational
    B: Rational
    F: RatPoly
    futaki: Rational
    weight: RatPoly  # p_c
    curvature_term: RatPoly  # sum_a d_a s_a x_a p_c / (1 + x_a z)

    @property
    def is_csc(self) -> bool:
        return self.A == 0

    def ode_rhs(self) -> RatPoly:
        """``F''`` as a polynomial: ``(A z + B) p_c + 2 sum_a d_a s_a x_a p_c/(1+x_a z)``."""
        return RatPoly((self.B, self.A)) * self.weight + self.curvature_term * 2


# integrals of t^k over [-1, 1]
def _monomial_moment(k: int) -> Rational:
    return ZERO if k % 2 else rational(2) / (k + 1)


def _moment(p: RatPoly, r: int) -> Rational:
    # int_{-1}^{1} p(t) t^r dt without building p * t^r
    acc = ZERO
    for k, c in enumerate(p.coeffs):
        if c and (k + r) % 2 == 0:
            acc += c * 2 / (k + r + 1)
    return acc


def curvature_term(setup: AdmissibleSetup, weight: RatPoly | None = None) -> RatPoly:
    """``sum_a d_a s_a x_a p_c(t)/(1 + x_a t)`` as an exact polynomial."""
    if weight is None:
        weight = momentum_weight(setup)
    acc = RatPoly(())
    for d, x, s in setup.hat_factors():
        if not d or not s:
            continue
        reduced = weight.exact_div(RatPoly((ONE, x)))
        acc = acc + reduced * (d * s * x)
    return acc


def moments(setup: AdmissibleSetup) -> Moments:
    weight = momentum_weight(setup)
    return _moments_from(weight, curvature_term(setup, weight))


def _moments_from(weight: RatPoly, term: RatPoly) -> Moments:
    p1, pm1 = weight(ONE), weight(-ONE)
    return Moments(
        alpha0=_moment(weight, 0),
        alpha1=_moment(weight, 1),
        alpha2=_moment(weight, 2),
        beta0=p1 + pm1 + _moment(term, 0),
        beta1=p1 - pm1 + _moment(term, 1),
    )


def solve_AB(m: Moments) -> tuple[Rational, Rational]:
    """Solve ``A a1 + B a0 = -2 b0`` and ``A a2 + B a1 = -2 b1``."""
    det = m.alpha1 * m.alpha1 - m.alpha0 * m.alpha2
    if not det:
        raise SingularSystem("moment matrix is singular")
    A = (-2 * m.beta0 * m.alpha1 + 2 * m.beta1 * m.alpha0) / det
    B = (-2 * m.beta1 * m.alpha1 + 2 * m.beta0 * m.alpha2) / det
    return A, B


def futaki_invariant(m: Moments) -> Rational:
    return 2 * (m.alpha0 * m.beta1 - m.alpha1 * m.beta0) / (m.alpha0 * m.alpha0)


def _double_antiderivative(rhs: RatPoly) -> RatPoly:
    G = rhs.antiderivative().antiderivative()
    g1, gm1 = G(ONE), G(-ONE)
    return G + RatPoly((-(g1 + gm1) / 2, -(g1 - gm1) / 2))


def _ivp_construction(rhs: RatPoly, weight: RatPoly) -> RatPoly:
    # 2(z+1) p_c(-1) + int_{-1}^{z} rhs(t) (z - t) dt
    R1 = rhs.antiderivative()
    S1 = (rhs * RatPoly((ZERO, ONE))).antiderivative()
    z = RatPoly((ZERO, ONE))
    pm1 = weight(-ONE)
    return RatPoly((2 * pm1, 2 * pm1)) + z * (R1 - R1(-ONE)) - (S1 - S1(-ONE))


def extremal_polynomial(setup: AdmissibleSetup) -> ExtremalSolution:
    weight = momentum_weight(setup)
    term = curvature_term(setup, weight)
    m = _moments_from(weight, term)
    A, B = solve_AB(m)
    rhs = RatPoly((B, A)) * weight + term * 2
    F = _double_antiderivative(rhs)
    F_ivp = _ivp_construction(rhs, weight)
    if F != F_ivp:
        raise InternalMismatch("double-antiderivative and initial-value constructions disagree")
    dF = F.derivative()
    if F(ONE) or F(-ONE) or dF(ONE) != -2 * weight(ONE) or dF(-ONE) != 2 * weight(-ONE):
        raise InternalMismatch("extremal polynomial violates its boundary conditions")
    if F.degree > setup.m + 2:
        raise InternalMismatch("extremal polynomial exceeds degree m + 2")
    return ExtremalSolution(m, A, B, F, futaki_invariant(m), weight, term)


def scalar_curvature_profile(setup: AdmissibleSetup, F: RatPoly) -> Callable:
    """Evaluator ``z -> sum_a 2 d_a s_a x_a/(1 + x_a z) - F''(z)/p_c(z)``."""
    weight = momentum_weight(setup)
    d2 = F.derivative().derivative()
    terms = [(d, x, s) for d, x, s in setup.hat_factors() if d]

    def scal(z) -> Rational:
        z = rational(z)
        acc = ZERO
        for d, x, s in terms:
            den = 1 + x * z
            if not den:
                raise PoleAtQuery(f"1 + x z vanishes at z = {z}")
            acc += 2 * d * s * x / den
        pz = weight(z)
        if not pz:
            raise PoleAtQuery(f"p_c vanishes at z = {z}")
        return acc - d2(z) / pz

    return scal


def theta_profile(sol: ExtremalSolution, setup: AdmissibleSetup | None = None) -> RatFunc:
    """Momentum profile ``Theta = F / p_c`` with common factors cancelled."""
    weight = sol.weight if setup is None else momentum_weight(setup)
    return RatFunc(sol.F, weight)
