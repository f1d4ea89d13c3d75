"""Existence verdicts for extremal metrics, closed-form special cases, and
the destabilising three-factor family.

``classify`` deflates the extremal polynomial by its forced boundary factors
and certifies the sign of the quotient on ``(-1, 1)`` by exact root
isolation.  The remaining functions are independent closed forms used as
oracles for the general constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import gmpy2

from .exactpoly import (
    ONE,
    ZERO,
    DivisionNotExact,
    RatPoly,
    Rational,
    RootWitness,
    count_roots_open,
    rational,
    rational_root_in,
    rational_str,
)
from .extremal import ExtremalSolution, InternalMismatch, extremal_polynomial
from .setup import AdmissibleSetup, FactorDatum, nonnegative_base


class DeflationFailed(AssertionError):
    pass


class NoIntersectionFound(ValueError):
    pass


class ConstraintViolated(ValueError):
    pass


class TheoremViolated(AssertionError):
    pass


class VerdictKind(str, Enum):
    EXTREMAL_CSC = "ExtremalCSC"
    EXTREMAL_NON_CSC = "ExtremalNonCSC"
    NO_EXTREMAL_DOUBLE_ROOT = "NoExtremalDoubleRoot"
    NO_EXTREMAL_SIGN_CHANGE = "NoExtremalSignChange"

    @property
    def extremal(self) -> bool:
        return self in (VerdictKind.EXTREMAL_CSC, VerdictKind.EXTREMAL_NON_CSC)


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: RootWitness
    quotient: RatPoly
    solution: ExtremalSolution

    @property
    def exists(self) -> bool:
        return self.kind.extremal

    def to_record(self) -> dict:
        sol = self.solution
        return {
            "kind": self.kind.value,
            "A": rational_str(sol.A),
            "B": rational_str(sol.B),
            "futaki": rational_str(sol.futaki),
            "F": [rational_str(c) for c in sol.F.coeffs],
            "quotient": [rational_str(c) for c in self.quotient.coeffs],
            "witness": self.witness.to_record(),
        }


def boundary_factor(d0: int, dinf: int) -> RatPoly:
    """``(1+z)^(d0+1) (1-z)^(dinf+1)``."""
    return RatPoly((ONE, ONE)) ** (d0 + 1) * RatPoly((ONE, -ONE)) ** (dinf + 1)


def classify(setup: AdmissibleSetup, solution: Optional[ExtremalSolution] = None) -> Verdict:
    sol = extremal_polynomial(setup) if solution is None else solution
    try:
        Q = sol.F.exact_div(boundary_factor(setup.d0, setup.dinf))
    except DivisionNotExact as exc:
        raise DeflationFailed("extremal polynomial lacks its boundary factors") from exc
    if Q(ONE) <= 0 or Q(-ONE) <= 0:
        raise DeflationFailed("deflated quotient must be positive at z = +-1")
    witness = count_roots_open(Q, -ONE, ONE)
    if witness.count == 0:
        kind = VerdictKind.EXTREMAL_CSC if sol.A == 0 else VerdictKind.EXTREMAL_NON_CSC
    elif witness.has_odd_root():
        kind = VerdictKind.NO_EXTREMAL_SIGN_CHANGE
    else:
        kind = VerdictKind.NO_EXTREMAL_DOUBLE_ROOT
    return Verdict(kind, witness, Q, sol)


def nonneg_base_fastpath(setup: AdmissibleSetup) -> Optional[Verdict]:
    """Over a nonnegative base every class is extremal; check it.

    Returns ``None`` when the base has a negative factor (no claim made).
    """
    if not nonnegative_base(setup):
        return None
    v = classify(setup)
    if not v.exists:
        raise TheoremViolated(f"nonnegative base but verdict {v.kind.value}")
    return v


# -- one factor of dimension one: ruled case --------------------------------

def ruled_surface_c(d0: int, dinf: int, s, x, verify: bool = False) -> Rational:
    """Constant ``c`` with ``F = (1+z)^(d0+1)(1-z)^(dinf+1)((1+xz) + c(1-z^2))``."""
    s, x = rational(s), rational(x)
    k = 2 + d0 * (1 + x) + dinf * (1 - x)
    num = -2 * x * x * (k - s * x)
    den = k * (k + 2) + (4 + d0 + dinf) * (1 - x * x)
    c = num / den
    if verify:
        F = extremal_polynomial(AdmissibleSetup.of(d0, dinf, [(1, x, s)])).F
        closed = boundary_factor(d0, dinf) * (RatPoly((ONE, x)) + RatPoly((ONE, ZERO, -ONE)) * c)
        if F != closed:
            raise InternalMismatch("ruled-surface closed form disagrees with the moment solver")
    return c


def ruled_surface_c_at_one(d0: int, s) -> Rational:
    s = rational(s)
    return -(2 * (1 + d0) - s) / (2 * (1 + d0) * (2 + d0))


def ruled_surface_c_at_minus_one(dinf: int, s) -> Rational:
    s = rational(s)
    return -(2 * (1 + dinf) + s) / (2 * (1 + dinf) * (2 + dinf))


def ruled_surface_threshold(d0: int, dinf: int, s, tol="1/1000000000000") -> list:
    """Class parameters where the ruled-case quotient acquires a double root.

    The quotient ``(1+xz) + c(1-z^2)`` touches zero exactly when
    ``x^2 + 4c(1+c) = 0`` with its vertex ``x/(2c)`` inside ``(-1, 1)``.
    Returns refined isolating intervals in ``x`` (possibly empty).
    """
    s = rational(s)
    X = RatPoly((ZERO, ONE))
    k = RatPoly((2 + d0 + dinf, d0 - dinf))
    num = X * X * (k - X * s) * -2
    den = k * (k + 2) + (RatPoly((ONE, ZERO, -ONE)) * (4 + d0 + dinf))
    disc = X * X * den * den + num * (den + num) * 4
    out = []
    for lo, hi in ((-ONE, ZERO), (ZERO, ONE)):
        w = count_roots_open(disc, lo, hi).refine(rational(tol))
        for iv in w.intervals:
            xm = iv.midpoint()
            c = num(xm) / den(xm)
            if c < 0 and abs(xm / (2 * c)) < 1:
                out.append(iv)
    return out


# -- one factor of dimension two -------------------------------------------

def _hodge4_closed_form(d0: int, dinf: int, s: Rational, x: Rational) -> tuple[Rational, Rational]:
    a0, ai = rational(d0), rational(dinf)
    um, up = 1 - x, 1 + x
    d = (
        (1 + ai) * (2 + ai) ** 2 * (3 + ai) * um**4
        + 4 * (2 + a0) * (1 + ai) * (2 + ai) * (3 + ai) * um**3 * up
        + 6 * (2 + a0) * (2 + ai) * (4 + a0 + ai + (1 + a0) * (1 + ai)) * um**2 * up**2
        + 4 * (1 + a0) * (2 + a0) * (3 + a0) * (2 + ai) * um * up**3
        + (1 + a0) * (2 + a0) ** 2 * (3 + a0) * up**4
    )
    sx = s * x
    L = a0 * up + ai * um
    bracket = (
        4 * (6 - 3 * sx + sx * x * x)
        + a0 * up * ((5 - x) * up + (7 - x) * (3 - sx))
        + ai * um * ((5 + x) * um + (7 + x) * (3 - sx))
        + (9 - sx) * L**2
        + L**3
    )
    # the bracket fixes n only up to scale; -4 x^3 matches the linear solve exactly
    n = -4 * x**3 * bracket
    return n, d


def hodge4_coefficients(d0: int, dinf: int, s, x, verify: bool = False):
    """Solve for ``(c, e)`` in ``F = (1+z)^(d0+1)(1-z)^(dinf+1)((1+xz)^2 + (cz+e)(1-z^2))``.

    Returns ``(c, e, n, d)`` where ``n/d`` is the independent closed form of
    ``c``; a mismatch raises :class:`InternalMismatch`.
    """
    s, x = rational(s), rational(x)
    base = boundary_factor(d0, dinf)
    one_minus = RatPoly((ONE, ZERO, -ONE))
    F0 = base * RatPoly((ONE, x)) ** 2
    Fc = base * one_minus * RatPoly((ZERO, ONE))
    Fe = base * one_minus
    w = -ONE / x

    def d2(p):
        return p.derivative().derivative()

    def d3(p):
        return d2(p).derivative()

    target = 4 * s * x * (1 - ONE / x) ** d0 * (1 + ONE / x) ** dinf
    # row 1: F''(w) = 0 ; row 2: F'''(w)/x = target
    a11, a12, b1 = d2(Fc)(w), d2(Fe)(w), -d2(F0)(w)
    a21, a22, b2 = d3(Fc)(w) / x, d3(Fe)(w) / x, target - d3(F0)(w) / x
    det = a11 * a22 - a12 * a21
    c = (b1 * a22 - a12 * b2) / det
    e = (a11 * b2 - a21 * b1) / det
    n, d = _hodge4_closed_form(d0, dinf, s, x)
    if c != n / d:
        raise InternalMismatch("dimension-two closed form for c disagrees with the linear solve")
    if verify:
        F = extremal_polynomial(AdmissibleSetup.of(d0, dinf, [(2, x, s)])).F
        if F != F0 + Fc * c + Fe * e:
            raise InternalMismatch("dimension-two (c, e) form disagrees with the moment solver")
    return c, e, n, d


# -- two factors of dimension one: CSC locus --------------------------------

def csc_system_residuals(x1, x2, s, s1, s2) -> tuple[Rational, Rational, Rational]:
    x1, x2, s, s1, s2 = map(rational, (x1, x2, s, s1, s2))
    if x1 == x2:
        raise ValueError("x1 and x2 must differ")
    r1 = x1 * (s1 * (x1 - x2) - 2 + (1 - s) * x1 * x2) + 3 * (s - 1) * x2
    r2 = x2 * (s2 * (x2 - x1) - 2 + (1 - s) * x1 * x2) + 3 * (s - 1) * x1
    h = x1 * (6 + s1 * x1 * (x2 * x2 - 3)) + x2 * (6 + s2 * x2 * (x1 * x1 - 3))
    return r1, r2, h


def csc_scalar_parameter(x1, x2, s1) -> Rational:
    """Solve the first CSC relation for ``s`` (a sixth of the scalar curvature)."""
    x1, x2, s1 = map(rational, (x1, x2, s1))
    return (3 * x2 - x1 * (s1 * (x1 - x2) - 2 + x1 * x2)) / (x2 * (3 - x1 * x1))


@dataclass(frozen=True)
class CscLocusPoint:
    x1: Rational
    x2: Rational
    s: Rational
    exact: bool  # False when x2 is a rational approximation of an irrational root
    kind: Optional[VerdictKind] = None

    def to_record(self) -> dict:
        return {
            "x1": rational_str(self.x1),
            "x2": rational_str(self.x2),
            "s": rational_str(self.s),
            "exact": self.exact,
            "kind": None if self.kind is None else self.kind.value,
        }


def two_factor_setup(x1, x2, s1, s2) -> AdmissibleSetup:
    return AdmissibleSetup.of(0, 0, [(1, x1, s1), (1, x2, s2)])


def csc_locus_scan(s1, s2, grid: int = 40, x1_range=(0, 1), tol="1/1099511627776") -> list[CscLocusPoint]:
    """Sweep ``x1 = lo + k (hi - lo)/grid`` and solve the hypersurface for ``x2``.

    For fixed ``x1`` the hypersurface is a polynomial in ``x2``; its roots in
    ``(-1, 0)`` and ``(0, 1)`` are isolated exactly, kept exact when rational
    and otherwise refined to ``tol``.  Points with ``s >= 0`` are confirmed by
    the general classifier.
    """
    s1, s2, tol = rational(s1), rational(s2), rational(tol)
    lo, hi = rational(x1_range[0]), rational(x1_range[1])
    points = []
    for k in range(1, grid):
        x1 = lo + (hi - lo) * k / grid
        if x1 == 0 or abs(x1) >= 1:
            continue
        # h(x2) = (s1 x1^2 + s2 (x1^2 - 3)) x2^2 + 6 x2 + x1 (6 - 3 s1 x1)
        h = RatPoly((x1 * (6 - 3 * s1 * x1), 6, s1 * x1 * x1 + s2 * (x1 * x1 - 3)))
        for a, b in ((-ONE, ZERO), (ZERO, ONE)):
            for iv in count_roots_open(h, a, b).intervals:
                root = rational_root_in(h, iv.lo, iv.hi)
                if root is not None:
                    x2, exact = root, True
                else:
                    w = count_roots_open(h, iv.lo, iv.hi).refine(tol).intervals[0]
                    x2, exact = w.midpoint(), False
                if x2 == x1:
                    continue
                s = csc_scalar_parameter(x1, x2, s1)
                kind = None
                if s >= 0:
                    v = classify(two_factor_setup(x1, x2, s1, s2))
                    kind = v.kind
                    if exact and kind is not VerdictKind.EXTREMAL_CSC:
                        raise TheoremViolated(f"CSC solution with s >= 0 not classified CSC at {x1}, {x2}")
                    if not exact and not kind.extremal:
                        raise TheoremViolated(f"near-CSC class not extremal at {x1}, {x2}")
                points.append(CscLocusPoint(x1, x2, s, exact, kind))
    return points


# -- scalar-flat classes ----------------------------------------------------

@dataclass(frozen=True)
class ZeroScalarPoint:
    x1_lo: Rational
    x1_hi: Rational
    x1: Rational
    x2: Rational
    r1: Rational
    r2: Rational


def _f1(x1, s1):
    den = x1 * x1 - s1 * x1 - 3
    if not den:
        return None
    return x1 * (2 - s1 * x1) / den


def zero_scalar_intersection(s1, s2, tol="1/1000000000000", grid: int = 512) -> ZeroScalarPoint:
    """Locate a scalar-flat class for two curve factors with ``s1 <= 0 < s2``.

    Along the graph ``x2 = f1(x1)`` (first relation with ``s = 0``) the
    second relation's residual is negative near ``x1 = 0`` and positive where
    the graph reaches ``x2 = -1``; bisection in ``x1`` with exact rational
    endpoints brackets the crossing.
    """
    s1, s2, tol = rational(s1), rational(s2), rational(tol)
    if not (s1 <= 0 < s2):
        raise NoIntersectionFound("requires s1 <= 0 < s2")

    def psi(x1):
        x2 = _f1(x1, s1)
        if x2 is None or not (-1 < x2 < 0):
            return None
        return csc_system_residuals(x1, x2, ZERO, s1, s2)[1]

    a = None
    bracket = None
    for k in range(1, grid):
        x1 = rational(k) / grid
        val = psi(x1)
        if val is None:
            # the graph left the square; close in on the exit from the last valid point
            if a is None:
                break
            left, right = a, x1
            for _ in range(200):
                mid = (left + right) / 2
                vm = psi(mid)
                if vm is None:
                    right = mid
                elif vm >= 0:
                    bracket = (a, mid)
                    break
                else:
                    left = mid
            break
        if val >= 0:
            if a is not None:
                bracket = (a, x1)
            break
        a = x1
    if bracket is None:
        raise NoIntersectionFound(f"no crossing found for s1={s1}, s2={s2}")
    lo, hi = bracket
    while hi - lo > tol:
        mid = (lo + hi) / 2
        vm = psi(mid)
        if vm is not None and vm >= 0:
            hi = mid
        else:
            lo = mid
    x1 = hi
    x2 = _f1(x1, s1)
    r1, r2, _ = csc_system_residuals(x1, x2, ZERO, s1, s2)
    return ZeroScalarPoint(lo, hi, x1, x2, r1, r2)


def rscase_obstruction(genus: int, degrees) -> bool:
    """True when a split bundle over a curve is excluded from carrying CSC metrics."""
    degrees = list(degrees)
    if not degrees:
        raise ValueError("degrees must be nonempty")
    gap = max(degrees) - min(degrees)
    if genus >= 2:
        return gap > genus - 1
    return gap != 0


# -- destabilising family ---------------------------------------------------

@dataclass(frozen=True)
class CounterexampleCertificate:
    x3: Rational
    mu: Rational
    s: tuple[Rational, Rational, Rational]
    target: RatPoly
    verdict: Verdict
    irrational_double_root: bool
    negative_curvature: bool  # every s_a x_a < 0

    def double_root_interval(self, width="1/1000000"):
        w = self.verdict.witness.refine(rational(width))
        return next(iv for iv in w.intervals if not iv.odd)

    def to_record(self) -> dict:
        return {
            "x3": rational_str(self.x3),
            "mu": rational_str(self.mu),
            "s": [rational_str(v) for v in self.s],
            "negative_curvature": self.negative_curvature,
            "irrational_double_root": self.irrational_double_root,
            "double_root_interval": self.double_root_interval().to_record(),
            "verdict": self.verdict.to_record(),
        }


def counterexample_setup(x1, x2, r, require_negative: bool = True):
    """Three curve factors whose extremal polynomial is ``mu (1-z^2)(z^2+rz-1)^2``.

    The roots of ``F''`` depend on ``r`` only, so whether every ``s_a x_a``
    is negative depends on where the poles ``-1/x_a`` fall among them.
    With ``require_negative`` false the data are returned regardless and
    the certificate records the sign condition.
    """
    x1, x2, r = rational(x1), rational(x2), rational(r)
    if not (1 > x1 > x2 > 0):
        raise ConstraintViolated("need 1 > x1 > x2 > 0")
    if not r > rational("8/5"):
        raise ConstraintViolated("need r > 8/5")
    x3 = -(x1 + x2) / (1 + x1 * x2)
    xs = (x1, x2, x3)
    weight = RatPoly((ONE, x1)) * RatPoly((ONE, x2)) * RatPoly((ONE, x3))
    if weight(ONE) != weight(-ONE):
        raise InternalMismatch("x3 does not balance the weight at the endpoints")
    mu = weight(ONE) / (r * r)
    target = RatPoly((ONE, ZERO, -ONE)) * RatPoly((-ONE, r, ONE)) ** 2 * mu
    d2 = target.derivative().derivative()
    ss = []
    for a, xa in enumerate(xs):
        prod = ONE
        for b, xb in enumerate(xs):
            if b != a:
                prod *= 1 - xb / xa
        ss.append(d2(-ONE / xa) / (2 * xa * prod))
    negative = all(sa * xa < 0 for sa, xa in zip(ss, xs))
    if require_negative and not negative:
        bad = [rational_str(sa * xa) for sa, xa in zip(ss, xs) if sa * xa >= 0]
        raise ConstraintViolated(f"s_a x_a not negative: {', '.join(bad)}")
    setup = AdmissibleSetup(0, 0, tuple(FactorDatum(1, xa, sa) for xa, sa in zip(xs, ss)))
    sol = extremal_polynomial(setup)
    if sol.F != target:
        raise InternalMismatch("extremal polynomial of the family differs from its target")
    verdict = classify(setup, sol)
    irrational = False
    for iv in verdict.witness.intervals:
        if not iv.odd:
            irrational = rational_root_in(verdict.quotient, iv.lo, iv.hi) is None
    return setup, CounterexampleCertificate(x3, mu, tuple(ss), target, verdict, irrational, negative)


def quadratic_disc_is_square(r) -> bool:
    """Whether ``z^2 + r z - 1`` has rational roots, i.e. ``r^2 + 4`` is a rational square."""
    r = rational(r)
    num = r.numerator**2 + 4 * r.denominator**2
    return bool(gmpy2.is_square(num))
