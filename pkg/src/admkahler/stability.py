"""Futaki invariants of the deformation to the normal cone of the infinity
section, and the identity tying the modified invariant to ``F``.

Every quantity is assembled from the moment data and the curvature term
directly; the extremal polynomial enters only on the other side of the
identity ``alpha0^2 F_beta(alpha) = -alpha0 F(z) / 4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .classify import VerdictKind, classify
from .exactpoly import (
    HALF,
    ONE,
    ZERO,
    RatPoly,
    Rational,
    RootInterval,
    rational,
    rational_root_in,
    rational_str,
)
from .extremal import ExtremalSolution, InternalMismatch, extremal_polynomial
from .setup import AdmissibleSetup


class OutOfRange(ValueError):
    pass


Z = RatPoly((ZERO, ONE))


def kernel_integral(g: RatPoly) -> RatPoly:
    """``z -> int_{-1}^{z} g(t) (z - t) dt`` as a polynomial in ``z``."""
    G = g.antiderivative()
    H = (g * Z).antiderivative()
    return Z * (G - G(-ONE)) - (H - H(-ONE))


@dataclass(frozen=True)
class StabilityPolynomials:
    """The invariants as polynomials in the deformation parameter ``z``."""

    ip_bb: Rational
    futaki_beta: Rational
    ip_ab: RatPoly
    futaki_alpha: RatPoly
    modified: RatPoly
    alpha0: Rational


def stability_polynomials(setup: AdmissibleSetup, sol: Optional[ExtremalSolution] = None) -> StabilityPolynomials:
    sol = extremal_polynomial(setup) if sol is None else sol
    m = sol.moments
    p = sol.weight
    a0 = m.alpha0
    I1 = kernel_integral(p)
    It = kernel_integral(p * Z)
    ip_bb = m.gram / a0
    ip_ab = -It + I1 * (m.alpha1 / a0)
    # subleading weight of the C^* action on sections
    tr_a0 = kernel_integral(sol.curvature_term) * -HALF - RatPoly((p(-ONE), p(-ONE))) * HALF
    fut_a = (tr_a0 * a0 + I1 * (m.beta0 / 2)) * (ONE / (a0 * a0))
    fut_b = (m.beta1 * a0 - m.beta0 * m.alpha1) / (2 * a0 * a0)
    modified = fut_a - ip_ab * (fut_b / ip_bb)
    return StabilityPolynomials(ip_bb, fut_b, ip_ab, fut_a, modified, a0)


def identity_holds(setup: AdmissibleSetup) -> bool:
    """``alpha0^2 F_beta(alpha) == -alpha0 F / 4`` coefficientwise."""
    sol = extremal_polynomial(setup)
    sp = stability_polynomials(setup, sol)
    lhs = sp.modified * (sp.alpha0 * sp.alpha0)
    rhs = sol.F * (-sp.alpha0 / 4)
    return lhs == rhs


@dataclass(frozen=True)
class StabilityReport:
    z: Rational
    futaki_alpha: Rational
    futaki_beta: Rational
    ip_ab: Rational
    ip_bb: Rational
    modified: Rational

    def to_record(self) -> dict:
        return {k: rational_str(getattr(self, k)) for k in
                ("z", "futaki_alpha", "futaki_beta", "ip_ab", "ip_bb", "modified")}


def stability_report(setup: AdmissibleSetup, z, polys: Optional[StabilityPolynomials] = None) -> StabilityReport:
    z = rational(z)
    if not -1 < z < 1:
        raise OutOfRange("z must lie in (-1, 1)")
    sp = stability_polynomials(setup) if polys is None else polys
    if sp.ip_bb <= 0:
        raise InternalMismatch("<beta, beta> must be positive")
    return StabilityReport(z, sp.futaki_alpha(z), sp.futaki_beta, sp.ip_ab(z), sp.ip_bb, sp.modified(z))


@dataclass(frozen=True)
class SlopeVerdict:
    kind: str  # "stable", "unstable", "boundary"
    witness: tuple[RootInterval, ...]
    irrational: bool  # boundary root(s) irrational: only a non-algebraic degeneration destabilises

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "witness": [iv.to_record() for iv in self.witness],
            "irrational": self.irrational,
        }


def relative_slope_verdict(setup: AdmissibleSetup, width="1/1000000") -> SlopeVerdict:
    v = classify(setup)
    if v.exists:
        return SlopeVerdict("stable", (), False)
    ivs = v.witness.refine(rational(width)).intervals
    if v.kind is VerdictKind.NO_EXTREMAL_SIGN_CHANGE:
        return SlopeVerdict("unstable", tuple(iv for iv in ivs if iv.odd), False)
    irrational = all(rational_root_in(v.quotient, iv.lo, iv.hi) is None for iv in ivs)
    return SlopeVerdict("boundary", ivs, irrational)


@dataclass(frozen=True)
class TrapeziumResult:
    scaled: tuple[tuple[int, Rational], ...]  # (k, k * deviation(k))
    limit: Rational  # (f'(b) - f'(0)) / 12
    bounded: bool

    @property
    def max_deviation(self) -> Rational:
        return max((abs(v) / k for k, v in self.scaled), default=ZERO)


def trapezium_deviation(f: RatPoly, b, eps: int, k: int) -> Rational:
    b = rational(b)
    n = b * k
    if n.denominator != 1 or n <= 0:
        raise ValueError("b*k must be a positive integer")
    total = sum((f(rational(i) / k) for i in range(eps, int(n) + 1)), ZERO)
    sign = 1 if eps == 0 else -1
    return total - (k * f.integrate(ZERO, b) + (f(b) + sign * f(ZERO)) / 2)


def trapezium_check(f: RatPoly, b, eps: int, kmax: int) -> TrapeziumResult:
    """Check the trapezium-rule remainder is ``O(1/k)``.

    ``k * deviation(k)`` tends to the Euler-Maclaurin constant
    ``(f'(b) - f'(0))/12``; boundedness is judged by the distance to that
    constant not growing from ``k`` to ``2k`` at the largest tested ``k``.
    """
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    b = rational(b)
    df = f.derivative()
    limit = (df(b) - df(ZERO)) / 12
    ks = [k for k in range(1, kmax + 1) if (b * k).denominator == 1]
    if not ks:
        raise ValueError("no k <= kmax makes b*k integral")
    scaled = {}
    for k in ks + [2 * ks[-1]]:
        scaled[k] = k * trapezium_deviation(f, b, eps, k)
    k = ks[-1]
    bounded = abs(scaled[2 * k] - limit) <= abs(scaled[k] - limit)
    return TrapeziumResult(tuple(sorted(scaled.items())), limit, bounded)
