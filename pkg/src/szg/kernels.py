"""Szego and Garabedian kernels built on the boundary solve.

Evaluation conventions: S(z, a) for interior z is the Cauchy integral of
the boundary samples of the solve with pole a. For a boundary point w0,
S(z, w0) = conj(S(w0, z)) is read off the solve with the interior pole z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .boundary import (
    BoundaryField,
    WeightField,
    cauchy_apply,
    check_field,
    constant_weight,
    param_derivative,
    upsample,
    weighted_inner,
)
from .geometry import DomainGeometry, boundary_distance, winding_number
from .kerzman_stein import SzegoSolution, solver_for

CONTOUR_POINTS = 64


class BoundaryZeroError(ValueError):
    """The Szego kernel (nearly) vanishes at a boundary node."""


class ZeroSearchError(RuntimeError):
    pass


class GarabedianZeroError(ZeroDivisionError):
    pass


@lru_cache(maxsize=16)
def reciprocal_weight(d: DomainGeometry, w: WeightField) -> WeightField:
    return w.reciprocal(d)


@lru_cache(maxsize=16)
def unit_weight(d: DomainGeometry) -> WeightField:
    return constant_weight(d, 1.0)


def szego(d: DomainGeometry, w: WeightField, z, a: complex) -> np.ndarray:
    """S_phi(z, a) at interior points z (vectorized)."""
    return solver_for(d, w).S(z, a)


def szego_interior(sol: SzegoSolution, zp: complex, d: DomainGeometry, w: WeightField) -> complex:
    if sol.domain_id != d.domain_id or sol.weight_id != w.weight_id:
        raise ValueError("solution does not belong to this domain/weight")
    return complex(cauchy_apply(sol.values, zp, d)[0])


def hermitian_symmetry_residual(d: DomainGeometry, w: WeightField, z1: complex, z2: complex) -> float:
    """|S(z1, z2) - conj(S(z2, z1))| from two independent pole solves."""
    if z1 == z2:
        raise ValueError("points must differ")
    s12 = szego(d, w, z1, z2)[0]
    s21 = szego(d, w, z2, z1)[0]
    return float(abs(s12 - np.conj(s21)))


# ------------------------------------------------------------ Garabedian


@dataclass(frozen=True, eq=False)
class GarabedianSolution:
    """Boundary samples of L_phi(., a) and its regular part l_phi(., a).

    With L = 1/(2 pi (z - a)) - i H_a, the holomorphic part H_a equals
    i * l on the boundary.
    """

    a: complex
    boundary_L: BoundaryField
    boundary_l: BoundaryField


def garabedian_from_szego(sol: SzegoSolution, d: DomainGeometry, w: WeightField) -> GarabedianSolution:
    S = check_field(sol.boundary, d)
    L = 1j * w.phi * np.conj(S) * np.conj(d.tangent)
    pole = 1.0 / (2.0 * math.pi * (d.z - sol.a))
    return GarabedianSolution(sol.a, BoundaryField(L, d.domain_id), BoundaryField(L - pole, d.domain_id))


def garabedian(d: DomainGeometry, w: WeightField, a: complex) -> GarabedianSolution:
    return garabedian_from_szego(solver_for(d, w).solve(a), d, w)


def garabedian_interior(g: GarabedianSolution, zp, d: DomainGeometry) -> np.ndarray:
    """L(zp, a) = 1/(2 pi (zp - a)) + l(zp, a) at interior points."""
    zp = np.atleast_1d(np.asarray(zp, dtype=complex))
    return 1.0 / (2.0 * math.pi * (zp - g.a)) + cauchy_apply(g.boundary_l.values, zp, d)


def boundary_identity_residual(sol: SzegoSolution, g: GarabedianSolution, d: DomainGeometry, w: WeightField) -> float:
    """max |phi conj(S) - (1/i) L T| with T recomputed spectrally from z(t)."""
    dz = param_derivative(d.z, d, 1)
    T = dz / np.abs(dz)
    lhs = w.phi * np.conj(sol.values)
    rhs = g.boundary_L.values * T / 1j
    return float(np.max(np.abs(lhs - rhs)))


def l_regular_interior(a: complex, zp, d: DomainGeometry, w: WeightField) -> np.ndarray:
    """l_phi(zp, a) = (P_{1/phi} A_{1/phi} G_a)(zp), G_a = 1/(2 pi (z - a))."""
    winv = reciprocal_weight(d, w)
    solver = solver_for(d, winv)
    Ga = 1.0 / (2.0 * math.pi * (d.z - complex(a)))
    return solver.project_interior(solver.matrix.apply(Ga), zp)


def reflection_identity_residual(a: complex, zp: complex, d: DomainGeometry, w: WeightField) -> float:
    """|L_phi(zp, a) + L_{1/phi}(a, zp)|."""
    if a == zp:
        raise ValueError("points must differ")
    left = garabedian_interior(garabedian(d, w, a), zp, d)[0]
    right = garabedian_interior(garabedian(d, reciprocal_weight(d, w), zp), a, d)[0]
    return float(abs(left + right))


def reproducing_residual(sol: SzegoSolution, h: BoundaryField, ha: complex, d: DomainGeometry, w: WeightField) -> float:
    """|<h, S_phi(., a)>_phi - h(a)|."""
    return float(abs(weighted_inner(h, sol.boundary, w, d) - ha))


# ------------------------------------------------------------------ zeros


def zero_count(sol: SzegoSolution, d: DomainGeometry, upsample_factor: int = 4) -> int:
    """Number of zeros of S(., a) in the domain from the boundary winding."""
    v = sol.values
    if np.min(np.abs(v)) < 1e-8:
        raise BoundaryZeroError("Szego kernel is below 1e-8 at a boundary node")
    total = 0.0
    for loop in upsample(v, d, upsample_factor):
        total += float(np.sum(np.angle(np.roll(loop, -1) / loop)))
    count = total / (2.0 * math.pi)
    if abs(count - round(count)) > 1e-3:
        raise ZeroSearchError(f"boundary winding {count} is not an integer")
    return int(round(count))


def _log_derivative_moments(values: np.ndarray, d: DomainGeometry, center: complex, kmax: int) -> np.ndarray:
    """(1/2 pi i) * integral of (z - center)^k f'/f dz, k = 0..kmax."""
    df = param_derivative(values, d, 1)
    ratio = df / values * d.h / (2j * math.pi)
    zc = d.z - center
    return np.array([np.sum(zc**k * ratio) for k in range(kmax + 1)])


def _roots_from_power_sums(p: np.ndarray, m: int) -> np.ndarray:
    e = [1.0 + 0j]
    for k in range(1, m + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)) / k)
    return np.roots([(-1) ** k * e[k] for k in range(m + 1)])


def contour_derivative(f, z0: complex, radius: float, order: int = 1, points: int = CONTOUR_POINTS) -> complex:
    """order-th derivative of holomorphic f at z0 by the trapezoid Cauchy formula."""
    theta = 2.0 * math.pi * np.arange(points) / points
    e = np.exp(1j * theta)
    vals = np.asarray(f(z0 + radius * e))
    return complex(math.factorial(order) * np.mean(vals * e ** (-order)) / radius**order)


def zero_locate(sol: SzegoSolution, d: DomainGeometry, w: WeightField, tol: float = 1e-8) -> list[complex]:
    """Zeros of S_phi(., a) inside the domain.

    Initial guesses come from the power sums of the zeros, which are
    boundary integrals of z^k S'/S; each guess is refined by Newton's method
    with S' from a contour integral on a circle of half the boundary distance.
    """
    m = zero_count(sol, d)
    if m == 0:
        return []
    center = complex(np.mean(d.components[0].z))
    p = _log_derivative_moments(sol.values, d, center, m)
    guesses = _roots_from_power_sums(p, m) + center

    f = lambda z: cauchy_apply(sol.values, z, d, check=False)
    zeros = []
    for z0 in guesses:
        z = complex(z0)
        for _ in range(40):
            if winding_number(d, z) != 1:
                raise ZeroSearchError(f"Newton iterate {z} left the domain")
            r = 0.5 * boundary_distance(d, z)
            fz = complex(f(z)[0])
            step = fz / contour_derivative(f, z, r)
            z -= step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if abs(complex(f(z)[0])) >= tol:
            raise ZeroSearchError(f"unresolved zero near {z0}: |S| = {abs(complex(f(z)[0])):.2e}")
        zeros.append(z)
    for i in range(len(zeros)):
        for j in range(i + 1, len(zeros)):
            if abs(zeros[i] - zeros[j]) < 1e-3:
                raise ZeroSearchError("clustered zeros; multiplicity cannot be resolved")
    return sorted(zeros, key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------- Ahlfors


@dataclass(eq=False)
class AhlforsMap:
    """f_a = S(., a) / L(., a) for the unweighted kernels."""

    a: complex
    szego: SzegoSolution
    garabedian: GarabedianSolution
    domain: DomainGeometry
    _zeros: list | None = field(default=None, repr=False)

    @property
    def zeros(self) -> list[complex]:
        """a together with the zeros of S(., a); all simple."""
        if self._zeros is None:
            w = unit_weight(self.domain)
            self._zeros = [self.a] + zero_locate(self.szego, self.domain, w)
        return self._zeros

    def boundary_values(self) -> np.ndarray:
        return self.szego.values / self.garabedian.boundary_L.values


def ahlfors_map(d: DomainGeometry, a: complex) -> AhlforsMap:
    w = unit_weight(d)
    sol = solver_for(d, w).solve(a)
    return AhlforsMap(complex(a), sol, garabedian_from_szego(sol, d, w), d)


def ahlfors_eval(f: AhlforsMap, zp) -> np.ndarray:
    """f_a(zp) = 2 pi (zp - a) S(zp, a) / (1 + 2 pi (zp - a) l(zp, a))."""
    d = f.domain
    zp = np.atleast_1d(np.asarray(zp, dtype=complex))
    s = cauchy_apply(f.szego.values, zp, d)
    l = cauchy_apply(f.garabedian.boundary_l.values, zp, d)
    x = 2.0 * math.pi * (zp - f.a)
    den = 1.0 + x * l
    if np.any(np.abs(den) < 1e-10):
        raise GarabedianZeroError("Garabedian kernel vanishes at an evaluation point")
    return x * s / den


def interpolation_terms(d: DomainGeometry, w: WeightField, f: AhlforsMap, z: complex, wq: complex):
    """Both sides of S_phi(z, w) = sum c_ij S_phi(z, a_i) conj(S_phi(w, a_j)) / (1 - f(z) conj f(w)).

    The a_i are the zeros of f and [c_ij] = [S_phi(a_i, a_j)]^{-1}.
    """
    fz, fw = ahlfors_eval(f, [z, wq])
    den = 1.0 - fz * np.conj(fw)
    if abs(den) <= 1e-3:
        raise ValueError("1 - f(z) conj(f(w)) is too close to zero")
    pts = f.zeros
    solver = solver_for(d, w)
    sols = solver.solve_many(pts)
    # M[i, j] = S_phi(a_i, a_j)
    M = np.column_stack([cauchy_apply(s.values, pts, d) for s in sols])
    c = np.linalg.inv(M)
    Sz = np.array([cauchy_apply(s.values, z, d)[0] for s in sols])
    Sw = np.array([cauchy_apply(s.values, wq, d)[0] for s in sols])
    right = (Sz @ c @ np.conj(Sw)) / den
    left = complex(solver.S(z, wq)[0])
    return left, complex(right)


def interpolation_residual(d: DomainGeometry, w: WeightField, f: AhlforsMap, z: complex, wq: complex) -> float:
    left, right = interpolation_terms(d, w, f, z, wq)
    return float(abs(left - right))
