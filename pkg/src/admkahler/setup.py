"""Numeric shadow of an admissible bundle together with an admissible class.

A setup is the data ``(d0, dinf, [(d_a, x_a, s_a), ...])``.  The two end
factors are derived, never supplied: ``x0 = 1, s0 = d0 + 1`` and
``x_inf = -1, s_inf = -(dinf + 1)``, which matches the Fubini--Study
normalisation of the blow-down fibres.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exactpoly import ONE, RatPoly, Rational, rational, rational_str, product


class SetupError(ValueError):
    """Raised when a setup file cannot be parsed or is invalid."""


@dataclass(frozen=True)
class IntegralityDatum:
    p: Rational
    q: int

    def __post_init__(self):
        object.__setattr__(self, "p", rational(self.p))
        if isinstance(self.q, bool) or int(self.q) != self.q:
            raise TypeError("q must be an integer")
        object.__setattr__(self, "q", int(self.q))


@dataclass(frozen=True)
class FactorDatum:
    """Base factor ``S_a``: complex dimension, class parameter and normalised scalar curvature."""

    dim: int
    x: Rational
    s: Rational
    integrality: Optional[IntegralityDatum] = None

    def __post_init__(self):
        object.__setattr__(self, "x", rational(self.x))
        object.__setattr__(self, "s", rational(self.s))
        if isinstance(self.dim, bool) or int(self.dim) != self.dim:
            raise TypeError("dim must be an integer")
        object.__setattr__(self, "dim", int(self.dim))

    def weight(self) -> RatPoly:
        """``(1 + x z) ** dim``."""
        return RatPoly((ONE, self.x)) ** self.dim


@dataclass(frozen=True)
class AdmissibleSetup:
    d0: int = 0
    dinf: int = 0
    factors: tuple[FactorDatum, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for name in ("d0", "dinf"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise TypeError(f"{name} must be an integer")
            object.__setattr__(self, name, int(v))

    @classmethod
    def of(cls, d0: int = 0, dinf: int = 0, factors=()) -> "AdmissibleSetup":
        """Build from plain tuples ``(dim, x, s)`` or ``(dim, x, s, p, q)``."""
        fs = []
        for f in factors:
            if isinstance(f, FactorDatum):
                fs.append(f)
            elif len(f) == 3:
                fs.append(FactorDatum(*f))
            else:
                dim, x, s, p, q = f
                fs.append(FactorDatum(dim, x, s, IntegralityDatum(p, q)))
        return cls(d0, dinf, tuple(fs))

    @property
    def m(self) -> int:
        """Complex dimension of the total space."""
        return 1 + self.d0 + self.dinf + sum(f.dim for f in self.factors)

    def hat_factors(self) -> list[tuple[int, Rational, Rational]]:
        """``(d_a, x_a, s_a)`` over the full index set, end factors included.

        End factors appear even when their dimension is zero; every sum
        weights its term by ``d_a`` so they drop out.
        """
        ends = [
            (self.d0, ONE, rational(self.d0 + 1)),
            (self.dinf, -ONE, rational(-(self.dinf + 1))),
        ]
        return ends + [(f.dim, f.x, f.s) for f in self.factors]

    def with_x(self, index: int, x) -> "AdmissibleSetup":
        fs = list(self.factors)
        f = fs[index]
        fs[index] = FactorDatum(f.dim, rational(x), f.s, f.integrality)
        return AdmissibleSetup(self.d0, self.dinf, tuple(fs))

    def mirrored(self) -> "AdmissibleSetup":
        """Swap the roles of the two sections: ``z -> -z``."""
        fs = tuple(
            FactorDatum(
                f.dim,
                -f.x,
                -f.s,
                None if f.integrality is None else IntegralityDatum(f.integrality.p, -f.integrality.q),
            )
            for f in self.factors
        )
        return AdmissibleSetup(self.dinf, self.d0, fs)

    # -- serialisation ----------------------------------------------------
    def to_record(self) -> dict:
        out = []
        for f in self.factors:
            rec = {"dim": f.dim, "x": rational_str(f.x), "s": rational_str(f.s)}
            if f.integrality is not None:
                rec["p"] = rational_str(f.integrality.p)
                rec["q"] = f.integrality.q
            out.append(rec)
        return {"d0": self.d0, "dinf": self.dinf, "factors": out}

    @classmethod
    def from_record(cls, rec: dict) -> "AdmissibleSetup":
        try:
            d0 = _int_field(rec.get("d0", 0), "d0")
            dinf = _int_field(rec.get("dinf", 0), "dinf")
            fs = []
            for i, f in enumerate(rec.get("factors", [])):
                unknown = set(f) - {"dim", "x", "s", "p", "q"}
                if unknown:
                    raise SetupError(f"factor {i}: unknown keys {sorted(unknown)}")
                integ = None
                if "p" in f or "q" in f:
                    if not ("p" in f and "q" in f):
                        raise SetupError(f"factor {i}: integrality needs both p and q")
                    integ = IntegralityDatum(_rat_field(f["p"], "p"), _int_field(f["q"], "q"))
                fs.append(
                    FactorDatum(
                        _int_field(f["dim"], "dim"),
                        _rat_field(f["x"], "x"),
                        _rat_field(f["s"], "s"),
                        integ,
                    )
                )
        except KeyError as exc:
            raise SetupError(f"missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SetupError):
                raise
            raise SetupError(str(exc)) from exc
        return cls(d0, dinf, tuple(fs))

    def to_toml(self) -> str:
        lines = [f"d0 = {self.d0}", f"dinf = {self.dinf}"]
        for f in self.to_record()["factors"]:
            lines += ["", "[[factors]]"]
            for k, v in f.items():
                lines.append(f"{k} = {v}" if isinstance(v, int) else f'{k} = "{v}"')
        return "\n".join(lines) + "\n"


def _int_field(v, name: str) -> int:
    if isinstance(v, bool):
        raise SetupError(f"{name}: expected integer")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        q = rational(v)
        if q.denominator == 1:
            return int(q.numerator)
    raise SetupError(f"{name}: expected integer, got {v!r}")


def _rat_field(v, name: str) -> Rational:
    if isinstance(v, float):
        raise SetupError(f"{name}: floats are not accepted, write rationals as \"p/q\" strings")
    try:
        return rational(v)
    except (TypeError, ValueError) as exc:
        raise SetupError(f"{name}: {exc}") from exc


def loads_setup(text: str, fmt: str = "toml") -> AdmissibleSetup:
    if fmt == "json":
        try:
            rec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SetupError(f"invalid JSON: {exc}") from exc
    else:
        try:
            rec = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise SetupError(f"invalid TOML: {exc}") from exc
    if not isinstance(rec, dict):
        raise SetupError("setup must be a table/object")
    return AdmissibleSetup.from_record(rec)


def load_setup(path) -> AdmissibleSetup:
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "toml"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SetupError(f"cannot read {path}: {exc}") from exc
    return loads_setup(text, fmt)


# -- operations -----------------------------------------------------------

def momentum_weight(setup: AdmissibleSetup) -> RatPoly:
    """``p_c(z) = (1+z)^d0 (1-z)^dinf prod_a (1 + x_a z)^d_a``."""
    return product(RatPoly((ONE, x)) ** d for d, x, _ in setup.hat_factors() if d)


def validate(setup: AdmissibleSetup) -> list[str]:
    """List every violated invariant; empty means valid."""
    out = []
    if setup.d0 < 0:
        out.append("d0 must be nonnegative")
    if setup.dinf < 0:
        out.append("dinf must be nonnegative")
    # m = 1 (bare fibre, no base) is allowed: it is the canonical reference case
    if setup.m < 1:
        out.append("total complex dimension must be at least 1")
    for i, f in enumerate(setup.factors):
        if f.dim < 1:
            out.append(f"factor {i}: dimension must be positive")
        if not (0 < abs(f.x) < 1):
            out.append(f"factor {i}: class parameter out of range (need 0 < |x| < 1)")
        integ = f.integrality
        if integ is None:
            continue
        if integ.q == 0:
            out.append(f"factor {i}: q must be a nonzero integer")
            continue
        if f.s != integ.p / integ.q:
            out.append(f"factor {i}: s must equal p/q")
        if (integ.q > 0) != (f.x > 0):
            out.append(f"factor {i}: sign of q must match sign of x")
        if integ.p > f.dim + 1:
            out.append(f"factor {i}: Fujita bound p <= dim+1 violated")
    return out


def nonnegative_base(setup: AdmissibleSetup) -> bool:
    """True iff every positively oriented factor metric has Scal >= 0."""
    return all(f.s * f.x >= 0 for f in setup.factors)


def random_rational_in(rng, lo, hi, max_den: int = 60) -> Rational:
    """Uniform-ish rational strictly inside ``(lo, hi)`` with denominator <= max_den."""
    lo, hi = rational(lo), rational(hi)
    while True:
        den = rng.randint(2, max_den)
        num = rng.randint(int(lo * den) - 1, int(hi * den) + 1)
        q = rational(num) / den
        if lo < q < hi:
            return q


def random_setup(rng, max_factors: int = 3, max_dim: int = 3, max_end: int = 2,
                 nonnegative: bool = False, s_range: int = 4) -> AdmissibleSetup:
    """Random valid setup; ``rng`` is a ``random.Random``."""
    fs = []
    for _ in range(rng.randint(1, max_factors)):
        x = random_rational_in(rng, 0, 1)
        if rng.random() < 0.5:
            x = -x
        s = random_rational_in(rng, -s_range, s_range, 12)
        if nonnegative and s * x < 0:
            s = -s
        fs.append(FactorDatum(rng.randint(1, max_dim), x, s))
    return AdmissibleSetup(rng.randint(0, max_end), rng.randint(0, max_end), tuple(fs))
