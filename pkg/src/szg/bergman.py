"""Bergman, reduced Bergman and higher-order reduced Bergman kernels.

The unweighted Bergman kernel of a bounded domain differs from 4 pi S^2 by
an element of F', the (n-1)-dimensional span of the derivatives of the
harmonic measures. The reduced kernel removes the F' component:

    K~(z, w) = 4 pi S(z, w)^2 - P_F'[4 pi S(., w)^2](z)
    K(z, w)  = K~(z, w) + sum_{m,l} h_m(z) (G^-1)_{ml} conj(h_l(w))

for any basis h_m of F' with Gram matrix G_{lm} = <h_m, h_l>. Harmonic
measures are never computed; the basis comes either from a closed form
(annulus: 1/z) or from the span {L_phi(., b_j) S_phi(., a)} where the b_j
are the zeros of S_phi(., a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .boundary import (
    WeightField,
    cauchy_apply,
    contour_integral,
    periodic_primitive,
    weighted_inner,
)
from .geometry import DomainGeometry, boundary_distance, inside_near_boundary, winding_numbers
from .kernels import CONTOUR_POINTS, garabedian, unit_weight, zero_count, zero_locate
from .kerzman_stein import solver_for

MAX_ORDER = 4


class BasisError(ValueError):
    pass


class GridResolutionError(RuntimeError):
    pass


class RadiusCollapseError(ValueError):
    pass


class IllConditionedError(RuntimeError):
    def __init__(self, message: str, cond: float):
        super().__init__(message)
        self.cond = cond


# ------------------------------------------------------------- functions


@dataclass(frozen=True, eq=False)
class HoloFunction:
    """Holomorphic function on the domain known by its boundary samples.

    Interior values come from the Cauchy integral unless a closed form is
    attached.
    """

    boundary: np.ndarray
    domain: DomainGeometry
    closed_form: Callable | None = None

    def __call__(self, zp) -> np.ndarray:
        zp = np.atleast_1d(np.asarray(zp, dtype=complex))
        if self.closed_form is not None:
            return np.asarray(self.closed_form(zp), dtype=complex)
        return cauchy_apply(self.boundary, zp, self.domain, check=False)


@dataclass(frozen=True, eq=False)
class FPrimeBasis:
    basis_id: str
    functions: tuple[HoloFunction, ...]
    domain_id: str
    pole: complex | None = None
    zeros: tuple[complex, ...] = ()

    def __len__(self) -> int:
        return len(self.functions)

    def evaluate(self, zp) -> np.ndarray:
        """Array of shape (len(basis), len(zp))."""
        zp = np.atleast_1d(np.asarray(zp, dtype=complex))
        if not self.functions:
            return np.zeros((0, zp.size), dtype=complex)
        return np.vstack([h(zp) for h in self.functions])

    def boundary_matrix(self) -> np.ndarray:
        return np.vstack([h.boundary for h in self.functions])


def fprime_basis(d: DomainGeometry, w: WeightField | None = None, a: complex | None = None,
                 kind: str = "szego-span") -> FPrimeBasis:
    """A basis of F'.

    kind="analytic-annulus" returns {1/z} for the annulus preset. The
    szego-span basis is h_j = L_phi(., b_j) S_phi(., a) over the zeros b_j of
    S_phi(., a); the pole of L at b_j cancels against the zero of S.
    """
    if d.connectivity == 1:
        return FPrimeBasis("empty", (), d.domain_id)
    if kind == "analytic-annulus":
        if d.preset != "annulus":
            raise BasisError("the analytic basis exists only for the annulus preset")
        f = HoloFunction(1.0 / d.z, d, lambda zp: 1.0 / zp)
        return FPrimeBasis(kind, (f,), d.domain_id)
    if kind != "szego-span":
        raise BasisError(f"unknown basis kind {kind!r}")
    from .geometry import default_pole

    w = unit_weight(d) if w is None else w
    a = default_pole(d) if a is None else complex(a)
    sol = solver_for(d, w).solve(a)
    if zero_count(sol, d) != d.connectivity - 1:
        raise BasisError("S_phi(., a) does not have n - 1 zeros for this pole and weight")
    zeros = zero_locate(sol, d, w)
    funcs = []
    for b in zeros:
        Lb = garabedian(d, w, b).boundary_L.values
        funcs.append(HoloFunction(Lb * sol.values, d))
    return FPrimeBasis(kind, tuple(funcs), d.domain_id, a, tuple(zeros))


# ------------------------------------------------------ area inner products


def _period(values: np.ndarray, d: DomainGeometry, comp: int) -> complex:
    """(1/2 pi i) times the counterclockwise integral of f dz around hole `comp`."""
    s = d.slices()[comp]
    integral = np.sum(values[s] * d.dz[s] * d.h[s])
    return complex(-integral / (2j * math.pi))


def _strip_periods(values: np.ndarray, d: DomainGeometry):
    periods, out = [], values.astype(complex).copy()
    for j, c in enumerate(d.hole_points, start=1):
        p = _period(values, d, j)
        periods.append(p)
        out = out - p / (d.z - c)
    return out, periods


def area_inner_boundary(f: np.ndarray, g: np.ndarray, d: DomainGeometry) -> complex:
    """Area integral of f conj(g) for holomorphic f, g from boundary samples.

    Each function is split as f0 + sum q_j/(z - c_j) with c_j inside hole j,
    so f0 has a single-valued primitive. Green's formula then gives
        (1/2i) * contour integral of f0 conj(G0) dz
    plus log|z - c_j|^2 terms for the period parts (z - c_j)^-1, whose
    antiholomorphic primitive is the multivalued log(conj(z - c_j)); since
    conj(1/(z-c)) = d/dzbar log|z - c|^2, the single-valued potential is used.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    f0, q = _strip_periods(f, d)
    g0, p = _strip_periods(g, d)
    G0 = periodic_primitive(g0 * d.dz, d)
    val = contour_integral(f0 * np.conj(G0), d) / 2j
    for pj, qj, c in zip(p, q, d.hole_points):
        logc = np.log(np.abs(d.z - c) ** 2)
        val += np.conj(pj) * contour_integral(f * logc, d) / 2j
        val += qj * np.conj(contour_integral(g0 * logc, d) / 2j)
    return complex(val)


@dataclass(frozen=True)
class AreaGrid:
    points: np.ndarray
    weights: np.ndarray
    cells: int


def area_grid(d: DomainGeometry, cells: int = 64, refine: int = 8) -> AreaGrid:
    """Masked midpoint rule on a square grid over the bounding box.

    Cells that may meet the boundary are split refine x refine and each
    sub-midpoint is kept iff it lies inside the smooth curve (not the node
    polygon, whose chordal cut would bias the area at order N^-2).
    """
    zo = d.components[0].z
    x0, x1 = zo.real.min(), zo.real.max()
    y0, y1 = zo.imag.min(), zo.imag.max()
    hc = max(x1 - x0, y1 - y0) / cells
    nx = int(math.ceil((x1 - x0) / hc)) + 2
    ny = int(math.ceil((y1 - y0) / hc)) + 2
    xs = x0 - hc + hc * (np.arange(nx) + 0.5)
    ys = y0 - hc + hc * (np.arange(ny) + 0.5)
    centers = (xs[None, :] + 1j * ys[:, None]).ravel()

    margin = 0.75 * hc + float(np.max(d.arc_weights))
    dist = np.empty(centers.size)
    for s in range(0, centers.size, 4096):
        dist[s : s + 4096] = np.min(np.abs(centers[s : s + 4096, None] - d.z[None, :]), axis=1)
    near = dist <= margin
    inside = np.zeros(centers.size, dtype=bool)
    inside[~near] = winding_numbers(d, centers[~near]) == 1

    sub = (np.arange(refine) + 0.5) / refine - 0.5
    offs = (hc * (sub[None, :] + 1j * sub[:, None])).ravel()
    cand = (centers[near][:, None] + offs[None, :]).ravel()
    keep = inside_near_boundary(d, cand)
    pts = np.concatenate([centers[inside], cand[keep]])
    wts = np.concatenate([np.full(int(inside.sum()), hc * hc), np.full(int(keep.sum()), (hc / refine) ** 2)])
    return AreaGrid(pts, wts, cells)


def area_inner_grid(f_vals: np.ndarray, g_vals: np.ndarray, grid: AreaGrid) -> complex:
    return complex(np.sum(f_vals * np.conj(g_vals) * grid.weights))


@lru_cache(maxsize=4)
def grid_pair(d: DomainGeometry, cells: int) -> tuple[AreaGrid, AreaGrid]:
    """Grids with `cells` and 2 * `cells` cells across, for Richardson extrapolation."""
    return area_grid(d, cells), area_grid(d, 2 * cells)


def richardson(coarse, fine):
    """Midpoint-rule extrapolation (error ~ h^2); returns (value, est_error of `fine`)."""
    coarse, fine = np.asarray(coarse), np.asarray(fine)
    corr = (fine - coarse) / 3.0
    return fine + corr, float(np.max(np.abs(corr)))


# ------------------------------------------------------------ Gram matrix


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    method: str
    est_error: float

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.entries) if self.entries.size else self.entries


def _gram_grid(basis: FPrimeBasis, grid: AreaGrid):
    H = basis.evaluate(grid.points)
    return (np.conj(H) * grid.weights) @ H.T  # [l, m] = <h_m, h_l>


def gram_matrix(basis: FPrimeBasis, d: DomainGeometry, method: str | None = None,
                cells: int = 64, tol: float | None = None) -> GramMatrix:
    """G[l, m] = <h_m, h_l> over the domain.

    Methods: closed-form (analytic annulus basis only), boundary-integral
    (Green's formula on boundary samples, the default) and grid (masked
    midpoint at `cells` and 2*`cells`, Richardson-extrapolated; est_error is
    the size of the extrapolation correction).
    """
    n = len(basis)
    if n == 0:
        return GramMatrix(np.zeros((0, 0), dtype=complex), method or "closed-form", 0.0)
    if method is None:
        method = "closed-form" if basis.basis_id == "analytic-annulus" else "boundary-integral"
    if method == "closed-form":
        if basis.basis_id != "analytic-annulus":
            raise BasisError("closed form Gram entries exist only for the analytic annulus basis")
        rho = d.params[1] / d.params[0]
        G = np.array([[2.0 * math.pi * math.log(1.0 / rho)]], dtype=complex)
        return GramMatrix(G, method, 0.0)
    if method == "boundary-integral":
        Hb = basis.boundary_matrix()
        G = np.array([[area_inner_boundary(Hb[m], Hb[l], d) for m in range(n)] for l in range(n)])
        G = 0.5 * (G + G.conj().T)
        return GramMatrix(G, method, 0.0)
    if method == "grid":
        g1, g2 = grid_pair(d, cells)
        G, err = richardson(_gram_grid(basis, g1), _gram_grid(basis, g2))
        if tol is not None and err > tol:
            raise GridResolutionError(f"grid estimate {err:.2e} exceeds requested {tol:.2e}")
        return GramMatrix(0.5 * (G + G.conj().T), method, err)
    raise ValueError(f"unknown Gram method {method!r}")


# -------------------------------------------------------- Bergman kernels


@dataclass(eq=False)
class BergmanKernel:
    """K and K~ of the domain (unweighted), evaluated pointwise.

    `inner` selects how the projection coefficients <4 pi S(., w)^2, h_l>
    are integrated: "boundary-integral" or "grid".
    """

    domain: DomainGeometry
    basis: FPrimeBasis
    gram: GramMatrix
    inner: str = "boundary-integral"
    cells: int = 64
    _coef: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.solver = solver_for(self.domain, unit_weight(self.domain))
        self._Ginv = self.gram.inverse

    def _square_boundary(self, w: complex) -> np.ndarray:
        return 4.0 * math.pi * self.solver.solve(w).values ** 2

    def projection_coefficients(self, w: complex) -> np.ndarray:
        """alpha with P_F'[4 pi S(., w)^2] = sum alpha_m h_m."""
        w = complex(w)
        if w in self._coef:
            return self._coef[w]
        n = len(self.basis)
        if n == 0:
            alpha = np.zeros(0, dtype=complex)
        else:
            f = self._square_boundary(w)
            if self.inner == "grid":
                sw = self.solver.solve(w).values
                levels = []
                for grid in grid_pair(self.domain, self.cells):
                    fg = 4.0 * math.pi * cauchy_apply(sw, grid.points, self.domain, check=False) ** 2
                    H = self.basis.evaluate(grid.points)
                    levels.append(np.array([area_inner_grid(fg, H[l], grid) for l in range(n)]))
                b, _ = richardson(*levels)
            else:
                Hb = self.basis.boundary_matrix()
                b = np.array([area_inner_boundary(f, Hb[l], self.domain) for l in range(n)])
            alpha = self._Ginv @ b
        self._coef[w] = alpha
        return alpha

    def square_term(self, zs, w: complex) -> np.ndarray:
        return 4.0 * math.pi * self.solver.S(zs, w) ** 2

    def reduced(self, zs, w: complex) -> np.ndarray:
        """K~(zs, w), vectorized over zs."""
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        val = self.square_term(zs, w)
        if len(self.basis):
            val = val - self.projection_coefficients(w) @ self.basis.evaluate(zs)
        return val

    def span_term(self, zs, w: complex) -> np.ndarray:
        """sum h_m(zs) (G^-1)_{ml} conj(h_l(w)): the kernel of F'."""
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        if not len(self.basis):
            return np.zeros(zs.size, dtype=complex)
        hw = self.basis.evaluate([w])[:, 0]
        return (self._Ginv @ np.conj(hw)) @ self.basis.evaluate(zs)

    def K(self, zs, w: complex) -> np.ndarray:
        return self.reduced(zs, w) + self.span_term(zs, w)

    __call__ = reduced


def make_bergman(d: DomainGeometry, basis_kind: str | None = None, gram_method: str | None = None,
                 inner: str = "boundary-integral", weight: WeightField | None = None,
                 pole: complex | None = None, cells: int = 64) -> BergmanKernel:
    if basis_kind is None:
        basis_kind = "analytic-annulus" if d.preset == "annulus" else "szego-span"
    basis = fprime_basis(d, weight, pole, basis_kind)
    return BergmanKernel(d, basis, gram_matrix(basis, d, gram_method, cells), inner, cells)


def bergman_kernel(z: complex, w: complex, d: DomainGeometry, basis: FPrimeBasis, g: GramMatrix) -> complex:
    return complex(BergmanKernel(d, basis, g).K(z, w)[0])


def reduced_bergman(z: complex, w: complex, K: Callable, basis: FPrimeBasis, g: GramMatrix) -> complex:
    """K(z, w) minus the F' reproducing kernel, for any evaluator K(z, w)."""
    val = complex(K(z, w))
    if len(basis):
        hz = basis.evaluate([z])[:, 0]
        hw = basis.evaluate([w])[:, 0]
        val -= complex(hz @ g.inverse @ np.conj(hw))
    return val


# ------------------------------------------------------------ derivatives


def _circle(center: complex, d: DomainGeometry, points: int):
    r = 0.5 * boundary_distance(d, center)
    if r < 1e-3 * d.scale:
        raise RadiusCollapseError(f"derivative circle around {center} has radius {r:.2e}")
    theta = 2.0 * math.pi * np.arange(points) / points
    e = np.exp(1j * theta)
    return center + r * e, e, r


def _conj_derivative(k: int, zs: np.ndarray, zeta: complex, F, d: DomainGeometry, points: int) -> np.ndarray:
    """d^k/dzetabar^k F(z, zeta) for each z in zs; F hermitian, F(z, .) antiholomorphic."""
    if k == 0:
        return F(zs, zeta)
    s, e, r = _circle(zeta, d, points)
    scale = math.factorial(k) / r**k
    out = np.empty(len(zs), dtype=complex)
    for i, zp in enumerate(zs):
        # conj F(zp, s) = F(s, zp) is holomorphic in s
        vals = F(s, complex(zp))
        out[i] = np.conj(scale * np.mean(vals * e ** (-k)))
    return out


def kernel_derivative(j: int, k: int, z: complex, zeta: complex, F, d: DomainGeometry,
                      points: int = CONTOUR_POINTS) -> complex:
    """d^(j+k) F / dz^j dzetabar^k at (z, zeta) by contour integrals.

    F(zs, w) must be vectorized in zs, holomorphic in z, antiholomorphic in w
    and hermitian: F(z, w) = conj(F(w, z)).
    """
    if j < 0 or k < 0:
        raise ValueError("derivative orders must be nonnegative")
    if j == 0:
        return complex(_conj_derivative(k, np.array([complex(z)]), zeta, F, d, points)[0])
    c, e, r = _circle(complex(z), d, points)
    vals = _conj_derivative(k, c, zeta, F, d, points)
    return complex(math.factorial(j) * np.mean(vals * e ** (-j)) / r**j)


@dataclass(frozen=True)
class HigherOrderValue:
    value: complex
    J: float
    cond: float


def higher_reduced_report(nord: int, z: complex, zeta: complex, d: DomainGeometry, F,
                          max_cond: float = 1e12) -> HigherOrderValue:
    """n-th order reduced Bergman kernel from the determinant formula.

    Row 0 holds F_{0,kbar}(z, zeta); rows 1..n-1 hold F_{j,kbar}(zeta, zeta)
    for j = 0..n-2; columns k = 0..n-1. The result is
    (-1)^(n-1) det(.) / J_{n-2} with J_m = det(F_{j,kbar}(zeta, zeta))_{j,k<=m}.
    """
    if nord < 1 or nord > MAX_ORDER:
        raise ValueError(f"order must be between 1 and {MAX_ORDER}")
    if nord == 1:
        return HigherOrderValue(complex(F(z, zeta)[0]), 1.0, 1.0)
    n = nord
    top = [kernel_derivative(0, k, z, zeta, F, d) for k in range(n)]
    D = np.array([[kernel_derivative(j, k, zeta, zeta, F, d) for k in range(n)] for j in range(n - 1)])
    Jm = D[:, : n - 1]
    J = complex(np.linalg.det(Jm))
    cond = float(np.linalg.cond(Jm))
    if not (J.real > 1e-12) or cond > max_cond:
        raise IllConditionedError(f"J_{n - 2} = {J:.3e}, condition number {cond:.3e}", cond)
    M = np.vstack([np.array(top), D])
    val = (-1) ** (n - 1) * np.linalg.det(M) / J.real
    return HigherOrderValue(complex(val), J.real, cond)


def higher_reduced(nord: int, z: complex, zeta: complex, d: DomainGeometry, F) -> complex:
    return higher_reduced_report(nord, z, zeta, d, F).value


# ----------------------------------------------------------- Q_phi checks


def q_orthogonality_residual(w: WeightField, basis: FPrimeBasis, d: DomainGeometry, mmax: int = 6) -> float:
    """Normalized max of |<phi^-1 h T, g>_phi| and |<phi^-1 h T, conj g>_phi|.

    g runs over z^m (m <= mmax) and 1/(z - c) for the hole points c.
    """
    tests = [d.z**m for m in range(mmax + 1)] + [1.0 / (d.z - c) for c in d.hole_points]
    worst = 0.0
    for h in basis.functions:
        u = h.boundary * d.tangent / w.phi
        nu = math.sqrt(weighted_inner(u, u, w, d).real)
        for g in tests:
            ng = math.sqrt(weighted_inner(g, g, w, d).real)
            for gg in (g, np.conj(g)):
                worst = max(worst, abs(weighted_inner(u, gg, w, d)) / (nu * ng))
    return worst
