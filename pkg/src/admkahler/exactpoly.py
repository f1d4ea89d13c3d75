"""Exact rational scalars and univariate polynomials.

Scalars are ``gmpy2.mpq`` values (arbitrary precision, always in lowest
terms with a positive denominator).  :class:`RatPoly` stores ascending
coefficients in canonical form so that equality is coefficient equality.
Real roots are counted and isolated with Sturm sequences on the square-free
part, never with floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)
HALF = mpq(1, 2)


class DivisionNotExact(ArithmeticError):
    pass


class ZeroGcd(ArithmeticError):
    pass


class ZeroPolynomial(ValueError):
    pass


def rational(value) -> Rational:
    """Coerce ``int``, ``Fraction``, ``mpq`` or a ``"p/q"`` string to ``mpq``.

    Floats are rejected on purpose: every quantity here is meant to be exact.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int) or type(value).__name__ == "mpz":
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            return mpq(text)
        except ValueError as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing to convert float {value!r} to an exact rational")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rational_str(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _sign(q) -> int:
    return (q > 0) - (q < 0)


class RatPoly:
    """Univariate polynomial with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, Rational) else rational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @classmethod
    def _raw(cls, cs: list) -> "RatPoly":
        # cs must already be a list of mpq; strips trailing zeros in place
        while cs and not cs[-1]:
            cs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(cs)
        return p

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> "RatPoly":
        return cls([0] * k + [c])

    @classmethod
    def linear(cls, a, b) -> "RatPoly":
        """``a + b z``."""
        return cls((a, b))

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Rational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        try:
            return self.coeffs == RatPoly.constant(other).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RatPoly([{', '.join(rational_str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(rational_str(c) + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        return RatPoly.constant(other)

    def __neg__(self) -> "RatPoly":
        return RatPoly._raw([-c for c in self.coeffs])

    def __add__(self, other) -> "RatPoly":
        other = RatPoly._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] = cs[i] + c
        return RatPoly._raw(cs)

    __radd__ = __add__

    def __sub__(self, other) -> "RatPoly":
        return self + (-RatPoly._coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return RatPoly._coerce(other) - self

    def __mul__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = rational(other)
            return RatPoly._raw([c * a for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RatPoly._raw([])
        cs = [ZERO] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                cs[i + j] += ai * bj
        return RatPoly._raw(cs)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RatPoly":
        if n < 0:
            raise ValueError("negative power")
        result = RatPoly._raw([ONE])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "RatPoly":
        return self * rational(c)

    def divmod(self, other: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.coeffs
        dd = len(d) - 1
        lc = d[-1]
        if len(r) - 1 < dd:
            return RatPoly._raw([]), self
        q = [ZERO] * (len(r) - dd)
        for k in range(len(r) - 1 - dd, -1, -1):
            c = r[k + dd] / lc
            q[k] = c
            if c:
                for j in range(dd + 1):
                    r[k + j] -= c * d[j]
        return RatPoly._raw(q), RatPoly._raw(r[:dd])

    def __floordiv__(self, other) -> "RatPoly":
        return self.divmod(RatPoly._coerce(other))[0]

    def __mod__(self, other) -> "RatPoly":
        return self.divmod(RatPoly._coerce(other))[1]

    def exact_div(self, other) -> "RatPoly":
        q, r = self.divmod(RatPoly._coerce(other))
        if not r.is_zero():
            raise DivisionNotExact(f"{self!r} is not divisible by {other!r}")
        return q

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        lc = self.coeffs[-1]
        return RatPoly._raw([c / lc for c in self.coeffs])

    def gcd(self, other: "RatPoly") -> "RatPoly":
        """Monic greatest common divisor."""
        a, b = self, RatPoly._coerce(other)
        if a.is_zero() and b.is_zero():
            raise ZeroGcd("gcd(0, 0) is undefined")
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    # -- calculus ---------------------------------------------------------
    def derivative(self) -> "RatPoly":
        return RatPoly._raw([k * c for k, c in enumerate(self.coeffs) if k])

    def antiderivative(self) -> "RatPoly":
        """Antiderivative with zero constant term."""
        return RatPoly._raw([ZERO] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integrate(self, lo, hi) -> Rational:
        return definite_integral(self, lo, hi)

    def compose_linear(self, a, b) -> "RatPoly":
        """Return ``p(a + b z)``."""
        lin = RatPoly((a, b))
        result = RatPoly._raw([])
        for c in reversed(self.coeffs):
            result = result * lin + c
        return result

    def compose(self, other: "RatPoly") -> "RatPoly":
        result = RatPoly._raw([])
        for c in reversed(self.coeffs):
            result = result * other + c
        return result

    def __call__(self, x):
        if not isinstance(x, Rational):
            x = rational(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def primitive(self) -> "RatPoly":
        """Integer-coefficient multiple with content 1 and positive leading term."""
        if self.is_zero():
            return self
        den = 1
        for c in self.coeffs:
            den = gmpy2.lcm(den, c.denominator)
        ints = [c.numerator * (den // c.denominator) for c in self.coeffs]
        g = 0
        for n in ints:
            g = gmpy2.gcd(g, n)
        if ints[-1] < 0:
            g = -g
        return RatPoly._raw([mpq(n // g) for n in ints])


Z = RatPoly((0, 1))


def definite_integral(p: RatPoly, lo, hi) -> Rational:
    """Exact value of the integral of ``p`` over ``[lo, hi]``."""
    P = p.antiderivative()
    return P(rational(hi)) - P(rational(lo))


def product(polys: Iterable[RatPoly]) -> RatPoly:
    result = RatPoly._raw([ONE])
    for p in polys:
        result = result * p
    return result


# -- square-free structure ----------------------------------------------

def square_free_part(p: RatPoly) -> RatPoly:
    if p.is_zero():
        raise ZeroPolynomial("square-free part of the zero polynomial")
    if p.degree <= 1:
        return p.monic()
    g = p.gcd(p.derivative())
    return p.exact_div(g).monic()


def square_free_decomposition(p: RatPoly) -> list[tuple[RatPoly, int]]:
    """Yun's algorithm: monic, pairwise coprime ``a_i`` with ``p ~ prod a_i**i``.

    Only nonconstant factors are returned.
    """
    if p.is_zero():
        raise ZeroPolynomial("square-free decomposition of the zero polynomial")
    if p.degree <= 0:
        return []
    dp = p.derivative()
    a0 = p.gcd(dp)
    b = p.exact_div(a0)
    c = dp.exact_div(a0)
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        a = b.gcd(d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree > 0:
            out.append((a, i))
        i += 1
    return out


def sturm_sequence(p: RatPoly) -> list[RatPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2].divmod(seq[-1])[1]
        if r.is_zero():
            break
        # positive rescaling keeps signs and tames coefficient growth
        lc = r.coeffs[-1]
        seq.append(RatPoly._raw([-c / abs(lc) for c in r.coeffs]))
    if seq[-1].is_zero():
        seq.pop()
    return seq


def sign_variations(seq: Sequence[RatPoly], x) -> int:
    count = 0
    last = 0
    for q in seq:
        s = _sign(q(x))
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _deflate_endpoint(p: RatPoly, x) -> RatPoly:
    # divide out every factor (z - x)
    lin = RatPoly((-x, ONE))
    while p.degree > 0 and not p(x):
        p = p.exact_div(lin)
    return p


# -- witnesses ----------------------------------------------------------

@dataclass(frozen=True)
class RootInterval:
    """Open interval ``(lo, hi)`` holding exactly one distinct root."""

    lo: Rational
    hi: Rational
    parity: str  # "odd" or "even" multiplicity

    @property
    def odd(self) -> bool:
        return self.parity == "odd"

    @property
    def width(self) -> Rational:
        return self.hi - self.lo

    def midpoint(self) -> Rational:
        return (self.lo + self.hi) / 2

    def to_record(self) -> dict:
        return {"lo": rational_str(self.lo), "hi": rational_str(self.hi), "parity": self.parity}


@dataclass(frozen=True)
class RootWitness:
    polynomial: RatPoly
    lo: Rational
    hi: Rational
    intervals: tuple[RootInterval, ...]

    @property
    def count(self) -> int:
        return len(self.intervals)

    def has_odd_root(self) -> bool:
        return any(iv.odd for iv in self.intervals)

    def refine(self, width) -> "RootWitness":
        width = rational(width)
        sqf = square_free_part(self.polynomial)
        ivs = tuple(
            RootInterval(*refine_root(sqf, iv.lo, iv.hi, width), iv.parity) for iv in self.intervals
        )
        return RootWitness(self.polynomial, self.lo, self.hi, ivs)

    def to_record(self) -> dict:
        return {
            "lo": rational_str(self.lo),
            "hi": rational_str(self.hi),
            "count": self.count,
            "intervals": [iv.to_record() for iv in self.intervals],
        }


_SPLITS = (HALF, mpq(3, 7), mpq(4, 7), mpq(2, 5), mpq(3, 5), mpq(5, 11), mpq(6, 11))


def _split_point(p: RatPoly, lo, hi):
    for t in _SPLITS:
        m = lo + (hi - lo) * t
        if p(m):
            return m
    k = 13
    while True:  # finitely many roots, terminates quickly
        m = lo + (hi - lo) * mpq(k // 2, k)
        if p(m):
            return m
        k += 2


def _isolate(sqf, seq, lo, hi, vlo, vhi, out):
    n = vlo - vhi
    if n == 0:
        return
    if n == 1:
        out.append((lo, hi))
        return
    mid = _split_point(sqf, lo, hi)
    vmid = sign_variations(seq, mid)
    _isolate(sqf, seq, lo, mid, vlo, vmid, out)
    _isolate(sqf, seq, mid, hi, vmid, vhi, out)


def count_roots_open(p: RatPoly, lo, hi) -> RootWitness:
    """Distinct real roots of ``p`` in the open interval ``(lo, hi)``.

    Each returned interval has non-root endpoints and carries the parity of
    the root's multiplicity, read off the square-free decomposition.
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot count roots of the zero polynomial")
    lo, hi = rational(lo), rational(hi)
    if lo >= hi or p.degree <= 0:
        return RootWitness(p, lo, hi, ())
    sqf = square_free_part(p)
    sqf = _deflate_endpoint(_deflate_endpoint(sqf, lo), hi)
    if sqf.degree <= 0:
        return RootWitness(p, lo, hi, ())
    seq = sturm_sequence(sqf)
    vlo, vhi = sign_variations(seq, lo), sign_variations(seq, hi)
    if vlo == vhi:
        return RootWitness(p, lo, hi, ())
    raw: list = []
    _isolate(sqf, seq, lo, hi, vlo, vhi, raw)
    if p.degree == square_free_part(p).degree:
        ivs = tuple(RootInterval(a, b, "odd") for a, b in raw)
    else:
        factors = square_free_decomposition(p)
        ivs = []
        for a, b in raw:
            mult = next(m for f, m in factors if _sign(f(a)) * _sign(f(b)) < 0)
            ivs.append(RootInterval(a, b, "odd" if mult % 2 else "even"))
        ivs = tuple(ivs)
    return RootWitness(p, lo, hi, ivs)


def count_roots(p: RatPoly, lo, hi) -> int:
    return count_roots_open(p, lo, hi).count


def refine_root(sqf: RatPoly, lo, hi, width) -> tuple[Rational, Rational]:
    """Bisect an isolating interval of a square-free polynomial to ``width``."""
    lo, hi, width = rational(lo), rational(hi), rational(width)
    sqf = _deflate_endpoint(_deflate_endpoint(sqf, lo), hi)
    slo = _sign(sqf(lo))
    if slo == 0 or _sign(sqf(hi)) == 0:
        raise ValueError("isolating interval endpoints must not be roots")
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(sqf(mid))
        if sm == 0:
            # exact rational root: return a tiny interval around it
            eps = min(width, hi - lo) / 4
            return mid - eps, mid + eps
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def rational_root_in(p: RatPoly, lo, hi):
    """Return the rational root of ``p`` in ``(lo, hi)`` if one exists.

    Requires that ``(lo, hi)`` isolate a single root of ``p``.  A rational root
    of the primitive integer form has denominator dividing the leading
    coefficient ``c``; once the interval is narrower than ``1/(2c^2)`` the
    closest fraction with denominator at most ``c`` is the only candidate.
    """
    lo, hi = rational(lo), rational(hi)
    prim = _deflate_endpoint(_deflate_endpoint(square_free_part(p), lo), hi).primitive()
    lc = int(abs(prim.lc.numerator))
    target = mpq(1, 2 * lc * lc + 1)
    if hi - lo > target:
        lo, hi = refine_root(prim, lo, hi, target)
    mid = (lo + hi) / 2
    cand = Fraction(int(mid.numerator), int(mid.denominator)).limit_denominator(lc)
    cand = mpq(cand.numerator, cand.denominator)
    if lo < cand < hi and not prim(cand):
        return cand
    return None


def _signed_remainders(a: RatPoly, b: RatPoly) -> list[RatPoly]:
    seq = [a, b]
    while not seq[-1].is_zero():
        r = seq[-2].divmod(seq[-1])[1]
        if r.is_zero():
            break
        lc = r.coeffs[-1]
        seq.append(RatPoly._raw([-c / abs(lc) for c in r.coeffs]))
    if seq[-1].is_zero():
        seq.pop()
    return seq


def tarski_query(g: RatPoly, p: RatPoly, lo, hi) -> int:
    """Sum of ``sign g(x)`` over the distinct roots ``x`` of ``p`` in ``(lo, hi)``.

    Uses the signed remainder sequence of ``p`` and ``p' g``; ``lo`` and
    ``hi`` must not be roots of ``p``.
    """
    lo, hi = rational(lo), rational(hi)
    if p(lo) == 0 or p(hi) == 0:
        raise ValueError("query endpoints must not be roots")
    if g.is_zero() or p.degree <= 0:
        return 0
    seq = _signed_remainders(p, p.derivative() * g)
    return sign_variations(seq, lo) - sign_variations(seq, hi)


def sign_at_root(g: RatPoly, p: RatPoly, lo, hi) -> int:
    """Sign of ``g`` at the unique root of ``p`` isolated by ``(lo, hi)``."""
    lo, hi = rational(lo), rational(hi)
    sqf = _deflate_endpoint(_deflate_endpoint(square_free_part(p), lo), hi)
    return tarski_query(g, sqf, lo, hi)


class RatFunc:
    """Quotient ``num/den`` of polynomials, kept with common factors cancelled."""

    __slots__ = ("num", "den")

    def __init__(self, num: RatPoly, den: RatPoly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = num, RatPoly((ONE,))
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc
        self.num = num * (ONE / lc)
        self.den = den * (ONE / lc)

    def __call__(self, x) -> Rational:
        x = rational(x)
        d = self.den(x)
        if not d:
            raise ZeroDivisionError(f"pole at {rational_str(x)}")
        return self.num(x) / d

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"
