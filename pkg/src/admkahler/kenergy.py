"""Reduced K-energy on discretised symplectic potentials.

The energy of ``U = u''`` is ``int_{-1}^{1} F(z) U(z) - p_c(z) log U(z) dz``
approximated by Gauss-Legendre quadrature.  ``F`` and ``p_c`` are evaluated
exactly at the (rationalised) nodes and rounded once.  Floats live only in
this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactpoly import ONE, ZERO, RatPoly, Rational, rational
from .extremal import InternalMismatch, extremal_polynomial
from .setup import AdmissibleSetup


class NonpositiveU(ValueError):
    pass


class NotBoundedBelow(ValueError):
    def __init__(self, msg, node=None):
        super().__init__(msg)
        self.node = node


MIN_NODES = 16


@dataclass(frozen=True)
class PotentialGrid:
    nodes: tuple  # rationals, strictly increasing in (-1, 1)
    U: np.ndarray
    weights: np.ndarray
    quadrature: str = "gauss-legendre"

    def __post_init__(self):
        if len(self.nodes) < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes")
        if len(self.U) != len(self.nodes) or len(self.weights) != len(self.nodes):
            raise ValueError("nodes, U and weights must have equal length")

    @property
    def z(self) -> np.ndarray:
        return np.array([float(t) for t in self.nodes])

    def with_U(self, U) -> "PotentialGrid":
        return PotentialGrid(self.nodes, np.asarray(U, dtype=float), self.weights, self.quadrature)


@dataclass(frozen=True)
class EnergyValue:
    value: float
    gradient: np.ndarray


def _gauss_nodes(N: int):
    z, w = np.polynomial.legendre.leggauss(N)
    # exact rational copies of the float nodes; symmetric pairs stay symmetric
    nodes = tuple(rational(Fraction(float(t))) for t in z)
    return nodes, w


def canonical_grid(N: int) -> PotentialGrid:
    """``U = 1/(1 - z^2)``: the potential of the canonical profile ``1 - z^2``."""
    if N < MIN_NODES:
        raise ValueError(f"N must be at least {MIN_NODES}")
    nodes, w = _gauss_nodes(N)
    U = np.array([float(ONE / (1 - t * t)) for t in nodes])
    return PotentialGrid(nodes, U, w)


def _sampled(setup: AdmissibleSetup, grid: PotentialGrid):
    sol = extremal_polynomial(setup)
    Fz = np.array([float(sol.F(t)) for t in grid.nodes])
    pz = np.array([float(sol.weight(t)) for t in grid.nodes])
    return Fz, pz


def _energy(Fz, pz, w, U) -> EnergyValue:
    U = np.asarray(U, dtype=float)
    if np.any(U <= 0) or not np.all(np.isfinite(U)):
        raise NonpositiveU("U must be positive and finite at every node")
    value = float(np.sum(w * (Fz * U - pz * np.log(U))))
    grad = w * (Fz - pz / U)
    return EnergyValue(value, grad)


def energy(setup: AdmissibleSetup, grid: PotentialGrid) -> EnergyValue:
    Fz, pz = _sampled(setup, grid)
    return _energy(Fz, pz, grid.weights, grid.U)


@dataclass(frozen=True)
class MinimizeResult:
    grid: PotentialGrid  # closed-form minimiser p_c/F
    descent: np.ndarray  # minimiser found by Newton descent
    iterations: int
    sup_diff: float


def minimize(setup: AdmissibleSetup, grid: PotentialGrid, tol: float = 1e-8, max_iter: int = 200) -> MinimizeResult:
    """Minimise the discrete energy; the integrand separates over nodes.

    The pointwise minimiser is ``U = p_c/F``.  Independently, damped Newton
    in ``V = log U`` runs from ``grid.U``; the two must agree to ``tol``.
    """
    sol = extremal_polynomial(setup)
    Fq = [sol.F(t) for t in grid.nodes]
    for t, f in zip(grid.nodes, Fq):
        if f <= 0:
            raise NotBoundedBelow(f"F <= 0 at node {float(t):.6g}; energy is unbounded below", node=t)
    Fz = np.array([float(f) for f in Fq])
    pz = np.array([float(sol.weight(t)) for t in grid.nodes])
    closed = np.array([float(sol.weight(t) / f) for t, f in zip(grid.nodes, Fq)])

    V = np.log(np.asarray(grid.U, dtype=float))
    it = 0
    for it in range(1, max_iter + 1):
        # g(V) = F e^V - p is convex increasing, so Newton converges from anywhere
        step = 1.0 - pz * np.exp(-V) / Fz
        V = V - step
        if np.max(np.abs(step)) < 1e-15:
            break
    descent = np.exp(V)
    sup = float(np.max(np.abs(descent - closed)))
    if sup > tol:
        raise InternalMismatch(f"descent minimiser differs from p/F by {sup:.3g}")
    return MinimizeResult(grid.with_U(closed), descent, it, sup)


# -- destabilising bumps ----------------------------------------------------

def bump_polynomial(center, width) -> tuple[RatPoly, Rational]:
    """``(w^2 - (z - z0)^2)^2`` on its support and its mass ``16 w^5/15``."""
    z0, w = rational(center), rational(width)
    shifted = RatPoly((w * w - z0 * z0, 2 * z0, -ONE))
    return shifted * shifted, 16 * w**5 / 15


@dataclass(frozen=True)
class DestabilizeResult:
    ks: tuple[int, ...]
    energies: tuple[float, ...]  # E(u_c + k f) - E(u_c)
    linear_coefficient: Rational  # int F f, exact

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.energies, self.energies[1:]))

    @property
    def increasing(self) -> bool:
        return all(b > a for a, b in zip(self.energies, self.energies[1:]))


def destabilize(setup: AdmissibleSetup, bump_center, bump_width, kmax: int, nodes: int = 200) -> DestabilizeResult:
    """Energy along ``U_c + k f`` for a unit-mass polynomial bump ``f``.

    ``E_k - E_0 = k int F f - int p_c log(1 + k f / U_c)``; the log term is
    nonnegative, so a negative ``int F f`` forces ``E_k <= k int F f``.
    """
    z0, w = rational(bump_center), rational(bump_width)
    if w <= 0 or not (-1 < z0 - w and z0 + w < 1):
        raise ValueError("bump support must lie inside (-1, 1)")
    if kmax < 1:
        raise ValueError("kmax must be positive")
    sol = extremal_polynomial(setup)
    bump, mass = bump_polynomial(z0, w)
    lin = (sol.F * bump).integrate(z0 - w, z0 + w) / mass

    t, wt = np.polynomial.legendre.leggauss(nodes)
    half, mid = float(w), float(z0)
    zs = mid + half * t
    wt = wt * half
    f = np.array([float(bump(rational(Fraction(float(s))))) for s in zs]) / float(mass)
    Uc = 1.0 / (1.0 - zs * zs)
    p = np.array([float(sol.weight(rational(Fraction(float(s))))) for s in zs])
    lin_f = float(lin)
    ks = tuple(range(1, kmax + 1))
    energies = tuple(k * lin_f - float(np.sum(wt * p * np.log1p(k * f / Uc))) for k in ks)
    if lin < 0 and not energies[-1] <= energies[0] + (kmax - 1) * lin_f / 2:
        raise InternalMismatch("energy failed to decrease along a bump with negative linear term")
    return DestabilizeResult(ks, energies, lin)


def most_negative_point(F: RatPoly, samples: int = 400):
    """Grid point in (-1, 1) where ``F`` is smallest (rational)."""
    best, arg = None, ZERO
    for i in range(1, samples):
        z = rational(2 * i - samples) / samples
        v = F(z)
        if best is None or v < best:
            best, arg = v, z
    return arg, best
