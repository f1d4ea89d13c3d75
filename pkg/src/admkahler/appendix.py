"""Beta-type moment integrals, small-x asymptotics of (A, B), and the
integer scan for order-two plane-bundle solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .exactpoly import (
    ONE,
    ZERO,
    RatPoly,
    Rational,
    count_roots_open,
    definite_integral,
    rational,
    rational_str,
    sign_at_root,
)
from .extremal import InternalMismatch, extremal_polynomial
from .setup import AdmissibleSetup, FactorDatum


def _closed_I(m: int, n: int, k: int) -> Rational:
    base = rational(2 ** (m + n + 1) * factorial(m) * factorial(n))
    if k == 0:
        return base / factorial(m + n + 1)
    if k == 1:
        return base * (m - n) / factorial(m + n + 2)
    if k == 2:
        return base * (m * m + n * n + m + n - 2 * m * n + 2) / factorial(m + n + 3)
    raise ValueError("k must be 0, 1 or 2")


def _exact_I(m: int, n: int, k: int) -> Rational:
    p = RatPoly((ONE, ONE)) ** m * RatPoly((ONE, -ONE)) ** n * RatPoly.monomial(k)
    return definite_integral(p, -1, 1)


def beta_moment_integral(m: int, n: int, k: int) -> Rational:
    """``int_{-1}^{1} (1+t)^m (1-t)^n t^k dt`` for ``k <= 2``, cross-checked."""
    if m < 0 or n < 0:
        raise ValueError("m, n must be nonnegative")
    v = _closed_I(m, n, k)
    if v != _exact_I(m, n, k):
        raise InternalMismatch(f"closed form for I({m},{n},{k}) disagrees with integration")
    return v


@dataclass
class IdentityReport:
    mmax: int
    failures: dict = field(default_factory=dict)  # identity name -> list of (m, n)
    checked: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def identity_suite(mmax: int = 10) -> IdentityReport:
    """Exact check of the four recursions relating ``I(m, n, k)``."""
    I = _closed_I
    rep = IdentityReport(mmax)
    names = ("k0", "k1", "k2", "k1-ratio", "closed-vs-integral")
    for name in names:
        rep.failures[name] = []
        rep.checked[name] = 0

    def record(name, ok, m, n):
        rep.checked[name] += 1
        if not ok:
            rep.failures[name].append((m, n))

    for m in range(mmax + 1):
        for n in range(mmax + 1):
            for k in range(3):
                record("closed-vs-integral", I(m, n, k) == _exact_I(m, n, k), m, n)
            s = m + n
            record("k1-ratio", I(m, n, 1) * (s + 2) == I(m, n, 0) * (m - n), m, n)
            if m < 1 or n < 1:
                continue
            lhs0 = I(m - 1, n, 0) * m * m + I(m, n - 1, 0) * n * n
            record("k0", lhs0 == I(m, n, 0) * (s + 1) * s / 2, m, n)
            lhs1 = I(m - 1, n, 1) * m * m + I(m, n - 1, 1) * n * n
            record("k1", lhs1 == I(m, n, 1) * (s - 1) * (s + 2) / 2, m, n)
            lhs2 = I(m - 1, n, 2) * m * m + I(m, n - 1, 2) * n * n
            record("k2", lhs2 == I(m, n, 2) * (s + 3) * s / 2 - I(m, n, 1) * (m - n), m, n)
    return rep


@dataclass(frozen=True)
class AsymptoticAB:
    A_lin: Rational
    B_const: Rational
    B_lin: Rational

    @property
    def A(self) -> Rational:
        return self.A_lin

    @property
    def B(self) -> Rational:
        return self.B_const + self.B_lin

    def to_record(self) -> dict:
        return {"A_lin": rational_str(self.A_lin), "B_const": rational_str(self.B_const),
                "B_lin": rational_str(self.B_lin)}


def asymptotic_AB(setup: AdmissibleSetup) -> AsymptoticAB:
    """First-order expansion of ``(A, B)`` in the base class parameters."""
    d0, di = setup.d0, setup.dinf
    sx = sum((f.dim * f.x for f in setup.factors), ZERO)
    ssx = sum((f.dim * f.s * f.x for f in setup.factors), ZERO)
    A_lin = -2 * (2 + d0 + di) * sx
    B_const = rational(-(1 + d0 + di) * (2 + d0 + di))
    B_lin = -2 * ssx + 2 * (d0 - di) * sx
    return AsymptoticAB(A_lin, B_const, B_lin)


def scaled(setup: AdmissibleSetup, eps) -> AdmissibleSetup:
    eps = rational(eps)
    fs = tuple(FactorDatum(f.dim, f.x * eps, f.s, f.integrality) for f in setup.factors)
    return AdmissibleSetup(setup.d0, setup.dinf, fs)


def asymptotic_remainders(setup: AdmissibleSetup, eps) -> tuple[Rational, Rational]:
    """``(A - A_asym, B - B_asym)`` at ``x_a -> eps x_a``."""
    st = scaled(setup, eps)
    sol = extremal_polynomial(st)
    asym = asymptotic_AB(st)
    return sol.A - asym.A, sol.B - asym.B


# -- order-two scan ---------------------------------------------------------

@dataclass(frozen=True)
class Order2Hit:
    q_plus: Rational
    q_minus: Rational
    eta: tuple  # isolating interval (lo, hi)
    beta_sign_witness: int


@dataclass
class Order2Scan:
    R: int
    hits: list
    pairs: int
    region_infeasible: bool

    def to_record(self) -> dict:
        return {
            "R": self.R,
            "pairs": self.pairs,
            "hits": [
                {"q_plus": rational_str(h.q_plus), "q_minus": rational_str(h.q_minus),
                 "eta": [rational_str(h.eta[0]), rational_str(h.eta[1])]}
                for h in self.hits
            ],
            "region_infeasible": self.region_infeasible,
        }


def order2_polynomials(qp: int, qm: int):
    """Numerators/denominators of ``beta(eta)`` from each relation, and the eliminant."""
    qp, qm = rational(qp), rational(qm)
    Np = RatPoly((1 - qp, -ONE, 3 * qp))  # q+(3e^2-1) - e + 1
    Dp = RatPoly((-ONE, 1 + 2 * qp))
    Nm = RatPoly((1 - qm, ONE, 3 * qm))  # q-(3e^2-1) + e + 1
    Dm = RatPoly((ONE, 1 + 2 * qm))
    return Np, Dp, Nm, Dm, Np * Dm - Nm * Dp


def order2_pair(qp, qm) -> list[Order2Hit]:
    """Admissible ``(eta, beta)`` for one pair ``(q+, q-)``: ``|eta| > 1``, ``|beta| < 1``."""
    qp, qm = rational(qp), rational(qm)
    Np, Dp, Nm, Dm, P = order2_polynomials(qp, qm)
    hits = []
    G = Np * Np - Dp * Dp
    if P.is_zero():
        # the relations coincide: a whole curve beta = N+/D+; hit iff G < 0 somewhere on |eta| > 1
        if _negative_somewhere_outside(G):
            hits.append(Order2Hit(qp, qm, (-ONE, ONE), -1))
        return hits
    # eta = +-1 always solves both relations, so P = (1 - eta^2) L with L at most linear
    L = P.exact_div(RatPoly((ONE, ZERO, -ONE)))
    if L.degree < 1:
        return hits
    if L.degree == 1:
        eta = -L.coeffs[0] / L.coeffs[1]
        # |eta| > 1 keeps D+ and D- away from zero (their roots have |eta| <= 1)
        if abs(eta) > 1:
            beta = Np(eta) / Dp(eta)
            if beta != Nm(eta) / Dm(eta):
                raise InternalMismatch(f"relations disagree at eta = {eta}")
            if abs(beta) < 1:
                hits.append(Order2Hit(qp, qm, (eta, eta), -1))
        return hits
    # not reached for integer q: general isolation kept for safety
    bound = 2 + max(abs(c / L.lc) for c in L.coeffs)
    for lo, hi in ((-bound, -ONE), (ONE, bound)):
        for iv in count_roots_open(L, lo, hi).intervals:
            # |beta| < 1  <=>  N+^2 - D+^2 < 0 at the root
            sgn = sign_at_root(G, L, iv.lo, iv.hi)
            if sgn < 0:
                hits.append(Order2Hit(qp, qm, (iv.lo, iv.hi), sgn))
    return hits


def _negative_somewhere_outside(G: RatPoly) -> bool:
    if G.is_zero():
        return False
    bound = 2 + max(abs(c / G.lc) for c in G.coeffs)
    for lo, hi in ((-bound, -ONE), (ONE, bound)):
        w = count_roots_open(G, lo, hi)
        if w.has_odd_root():
            return True
        # no sign change inside: the sign at any non-root point decides
        pts = [lo] + [iv.hi for iv in w.intervals]
        if any(G(t) < 0 for t in pts if G(t)):
            return True
    # beyond the Cauchy bound G has the sign of its leading term
    return G.lc < 0 or (G.degree % 2 == 1)


def region_infeasible(R: int) -> bool:
    """No integers with ``0 < |q| <= R`` satisfy the sign region for ``|eta|>1, |beta|<1``."""
    for qp in range(-R, R + 1):
        for qm in range(-R, R + 1):
            if qp == 0 or qm == 0:
                continue
            if qp > 0 and qm < 0 and 2 * qp - qm < 1:
                return False
            if qm > 0 and qp < 0 and 2 * qm - qp < 1:
                return False
    return True


def order2_scan(R: int, pool=None) -> Order2Scan:
    if R < 1:
        raise ValueError("R must be at least 1")
    pairs = [(qp, qm) for qp in range(-R, R + 1) for qm in range(-R, R + 1) if qp and qm]
    if pool is None:
        results = [order2_pair(*pq) for pq in pairs]
    else:
        results = pool.starmap(order2_pair, pairs, chunksize=256)
    hits = [h for r in results for h in r]
    return Order2Scan(R, hits, len(pairs), region_infeasible(R))
