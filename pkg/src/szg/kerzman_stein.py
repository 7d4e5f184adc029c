"""Weighted Kerzman-Stein kernel, its Nystrom matrix and the Szego solve.

The kernel

    A(z, zeta) = (1/2 pi i) [ T(zeta)/phi(zeta)/(zeta - z)
                              - conj(T(z))/phi(z)/(conj(zeta) - conj(z)) ]

is smooth on the boundary squared, with diagonal value
(1/2 pi i) d(1/phi)/ds. The operator it defines (integrated against
phi ds) is skew-adjoint in L^2(phi ds), so I - A and I + A are invertible
with inverses of norm at most 1. Boundary values of S_phi(., a) solve

    (I - A) S_phi(., a) = C_a / phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .boundary import (
    BoundaryField,
    WeightField,
    cauchy_apply,
    cauchy_kernel_field,
    check_field,
    weighted_inner,
)
from .geometry import DomainGeometry

LINEAR_RESIDUAL_TOL = 1e-10


class AssemblyError(RuntimeError):
    """The solved system residual is too large; the matrix is inconsistent."""


def _check_weight(d: DomainGeometry, w: WeightField) -> None:
    if w.domain_id != d.domain_id:
        raise ValueError(f"weight {w.weight_id} does not belong to domain {d.domain_id}")


def ks_offdiag(i: int, j: int, d: DomainGeometry, w: WeightField) -> complex:
    if i == j:
        raise ValueError("diagonal entries come from ks_diag")
    z, zeta = d.z[i], d.z[j]
    T = d.tangent
    inv = 1.0 / w.phi
    return complex(
        (T[j] * inv[j] / (zeta - z) - np.conj(T[i]) * inv[i] / np.conj(zeta - z))
        / (2j * math.pi)
    )


def ks_diag(i: int, d: DomainGeometry, w: WeightField) -> complex:
    return complex(w.dinv_ds[i] / (2j * math.pi))


@dataclass(frozen=True, eq=False)
class KSMatrix:
    entries: np.ndarray
    qweights: np.ndarray
    domain_id: str
    weight_id: str

    @property
    def operator(self) -> np.ndarray:
        """B[i, j] = entries[i, j] * qweights[j]; discrete action on samples."""
        return self.entries * self.qweights[None, :]

    def skew_defect(self) -> float:
        return float(np.max(np.abs(self.entries + self.entries.conj().T)))

    def apply(self, u) -> np.ndarray:
        v = u.values if isinstance(u, BoundaryField) else np.asarray(u)
        return self.entries @ (self.qweights * v)


def assemble_ks(d: DomainGeometry, w: WeightField) -> KSMatrix:
    _check_weight(d, w)
    z = d.z
    T = d.tangent
    inv = 1.0 / w.phi
    diff = z[None, :] - z[:, None]  # zeta_j - z_i
    np.fill_diagonal(diff, 1.0)
    E = ((T * inv)[None, :] / diff - (np.conj(T) * inv)[:, None] / np.conj(diff)) / (2j * math.pi)
    np.fill_diagonal(E, w.dinv_ds / (2j * math.pi))
    q = w.phi * d.arc_weights
    E.setflags(write=False)
    q.setflags(write=False)
    return KSMatrix(E, q, d.domain_id, w.weight_id)


@dataclass(frozen=True, eq=False)
class SzegoSolution:
    a: complex
    boundary: BoundaryField
    weight_id: str
    domain_id: str
    linear_residual: float
    reproducing_residual: float

    @property
    def values(self) -> np.ndarray:
        return self.boundary.values


@dataclass(eq=False)
class SzegoSolver:
    """One domain and weight: the KS matrix and factorizations of I -/+ B.

    Solutions are cached per pole, so repeated kernel evaluations with the
    same second argument cost one triangular solve.
    """

    domain: DomainGeometry
    weight: WeightField
    matrix: KSMatrix = field(init=False)
    _minus: tuple | None = field(default=None, init=False, repr=False)
    _plus: tuple | None = field(default=None, init=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.matrix = assemble_ks(self.domain, self.weight)

    def _factor(self, sign: int):
        B = self.matrix.operator
        n = B.shape[0]
        if sign < 0:
            if self._minus is None:
                self._minus = scipy.linalg.lu_factor(np.eye(n) - B, check_finite=False)
            return self._minus
        if self._plus is None:
            self._plus = scipy.linalg.lu_factor(np.eye(n) + B, check_finite=False)
        return self._plus

    def rhs(self, a: complex) -> np.ndarray:
        return cauchy_kernel_field(a, self.domain).values / self.weight.phi

    def solve_many(self, poles) -> list[SzegoSolution]:
        poles = [complex(a) for a in poles]
        todo = [a for a in dict.fromkeys(poles) if a not in self._cache]
        if todo:
            G = np.column_stack([self.rhs(a) for a in todo])
            X = scipy.linalg.lu_solve(self._factor(-1), G, check_finite=False)
            B = self.matrix.operator
            R = X - B @ X - G
            for k, a in enumerate(todo):
                self._cache[a] = self._package(a, X[:, k], R[:, k], G[:, k])
        return [self._cache[a] for a in poles]

    def solve(self, a: complex) -> SzegoSolution:
        return self.solve_many([a])[0]

    def _package(self, a, x, resid, g) -> SzegoSolution:
        lin = float(np.linalg.norm(resid) / np.linalg.norm(g))
        if lin > LINEAR_RESIDUAL_TOL:
            raise AssemblyError(f"linear residual {lin:.3e} exceeds {LINEAR_RESIDUAL_TOL}")
        d, w = self.domain, self.weight
        field_ = BoundaryField(x, d.domain_id)
        one = np.ones(d.total_nodes)
        rep = abs(weighted_inner(one, field_, w, d) - 1.0)
        return SzegoSolution(complex(a), field_, w.weight_id, d.domain_id, lin, float(rep))

    def project_interior(self, u, zp) -> np.ndarray:
        """Weighted Hardy projection P_phi u evaluated at interior points.

        From P_phi (I + A) = C, P_phi u = C[(I + A)^{-1} u].
        """
        v = check_field(u, self.domain) if isinstance(u, BoundaryField) else np.asarray(u)
        y = scipy.linalg.lu_solve(self._factor(+1), v.astype(complex), check_finite=False)
        return cauchy_apply(y, zp, self.domain)

    def S(self, zp, a: complex) -> np.ndarray:
        """S_phi(zp, a) for interior zp (array) via the Cauchy integral."""
        return cauchy_apply(self.solve(a).values, zp, self.domain)

    def symmetrized_singular_min(self) -> float:
        """Smallest singular value of D^(1/2) (I - B) D^(-1/2), D = diag(qweights)."""
        q = np.sqrt(self.matrix.qweights)
        n = q.size
        M = np.eye(n) - q[:, None] * self.matrix.entries * q[None, :]
        return float(np.linalg.svd(M, compute_uv=False).min())


@lru_cache(maxsize=16)
def solver_for(d: DomainGeometry, w: WeightField) -> SzegoSolver:
    """Shared solver per (domain, weight) object pair."""
    _check_weight(d, w)
    return SzegoSolver(d, w)


def solve_szego_boundary(
    m: KSMatrix, a: complex, d: DomainGeometry, w: WeightField
) -> SzegoSolution:
    if m.domain_id != d.domain_id or m.weight_id != w.weight_id:
        raise ValueError("KS matrix was assembled for a different domain or weight")
    solver = solver_for(d, w)
    return solver.solve(a)


def hardy_project_interior(
    u: BoundaryField, zp: complex, m: KSMatrix, d: DomainGeometry, w: WeightField
) -> complex:
    if m.domain_id != d.domain_id or m.weight_id != w.weight_id:
        raise ValueError("KS matrix was assembled for a different domain or weight")
    return complex(solver_for(d, w).project_interior(u, zp)[0])
