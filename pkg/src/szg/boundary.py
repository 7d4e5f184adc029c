"""Boundary fields, weights and trapezoid functionals on a DomainGeometry."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import DomainGeometry, boundary_distance, winding_number


class DomainMismatchError(ValueError):
    pass


class NotInDomainError(ValueError):
    pass


class NearBoundaryWarning(UserWarning):
    """Evaluation point is within a few node spacings of the boundary."""


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Complex samples, one per boundary node of the domain `domain_id`."""

    values: np.ndarray
    domain_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1:
            raise ValueError("BoundaryField values must be one-dimensional")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def _other(self, other):
        if isinstance(other, BoundaryField):
            if other.domain_id != self.domain_id:
                raise DomainMismatchError(f"{self.domain_id} vs {other.domain_id}")
            return other.values
        return other

    def __add__(self, other):
        return BoundaryField(self.values + self._other(other), self.domain_id)

    def __sub__(self, other):
        return BoundaryField(self.values - self._other(other), self.domain_id)

    def __mul__(self, other):
        return BoundaryField(self.values * self._other(other), self.domain_id)

    __radd__ = __add__
    __rmul__ = __mul__

    def __truediv__(self, other):
        return BoundaryField(self.values / self._other(other), self.domain_id)

    def __neg__(self):
        return BoundaryField(-self.values, self.domain_id)

    def conj(self) -> "BoundaryField":
        return BoundaryField(np.conj(self.values), self.domain_id)


def check_field(u: BoundaryField, d: DomainGeometry) -> np.ndarray:
    if u.domain_id != d.domain_id:
        raise DomainMismatchError(f"field on {u.domain_id} used with domain {d.domain_id}")
    if u.values.size != d.total_nodes:
        raise DomainMismatchError("field length does not match the node count")
    return u.values


def _values(u, d: DomainGeometry) -> np.ndarray:
    if isinstance(u, BoundaryField):
        return check_field(u, d)
    v = np.asarray(u, dtype=complex)
    if v.shape[-1] != d.total_nodes:
        raise DomainMismatchError("sample array length does not match the node count")
    return v


# ------------------------------------------------------------ spectral tools


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, 1.0 / n)


def _periodic_derivative(v: np.ndarray, order: int) -> np.ndarray:
    n = v.shape[-1]
    k = _wavenumbers(n)
    mult = (1j * k) ** order
    if order % 2:
        mult[n // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(v, axis=-1), axis=-1)


def param_derivative(values, d: DomainGeometry, order: int = 1) -> np.ndarray:
    """d^order/dt^order of the per-component trigonometric interpolant."""
    v = _values(values, d)
    out = np.empty_like(v)
    for s in d.slices():
        out[..., s] = _periodic_derivative(v[..., s], order)
    return out


def spectral_derivative(u: BoundaryField, d: DomainGeometry) -> BoundaryField:
    return BoundaryField(param_derivative(u, d, 1), d.domain_id)


def periodic_primitive(values, d: DomainGeometry) -> np.ndarray:
    """Zero-mean periodic antiderivative in t on every component.

    The input must have (numerically) zero mean on each component.
    """
    v = _values(values, d)
    out = np.empty_like(v)
    for s in d.slices():
        seg = v[s]
        n = seg.size
        c = np.fft.fft(seg)
        k = _wavenumbers(n)
        k[0] = 1.0
        c = c / (1j * k)
        c[0] = 0.0
        c[n // 2] = 0.0
        out[s] = np.fft.ifft(c)
    return out


def cs_norm(u: BoundaryField, s: int, d: DomainGeometry) -> float:
    """max over m <= s of sup |d^m u / dt^m| at the nodes."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    v = _values(u, d)
    best = float(np.max(np.abs(v)))
    for m in range(1, s + 1):
        best = max(best, float(np.max(np.abs(param_derivative(v, d, m)))))
    return best


def upsample(values, d: DomainGeometry, factor: int) -> list[np.ndarray]:
    """Trigonometric interpolation of each component onto `factor`x more nodes."""
    v = _values(values, d)
    out = []
    for s in d.slices():
        seg = v[s]
        n = seg.size
        c = np.fft.fft(seg)
        m = n * factor
        big = np.zeros(m, dtype=complex)
        half = n // 2
        big[:half] = c[:half]
        big[-half + 1 :] = c[half + 1 :]
        # split the Nyquist mode symmetrically
        big[half] = 0.5 * c[half]
        big[-half] = 0.5 * c[half]
        out.append(np.fft.ifft(big) * factor)
    return out


# ------------------------------------------------------------------ weights


@dataclass(frozen=True, eq=False)
class WeightField:
    """Positive boundary weight phi with d(1/phi)/ds precomputed."""

    phi: np.ndarray
    dinv_ds: np.ndarray
    domain_id: str
    label: str = "custom"

    @property
    def weight_id(self) -> str:
        return f"{self.label}@{self.domain_id}"

    @classmethod
    def from_samples(cls, d: DomainGeometry, phi, label: str = "custom") -> "WeightField":
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (d.total_nodes,):
            raise DomainMismatchError("weight samples do not match the node count")
        if not np.all(np.isfinite(phi)) or phi.min() <= 0:
            raise ValueError("weight must be finite and strictly positive")
        inv = 1.0 / phi
        if np.ptp(phi) == 0:
            dinv = np.zeros_like(phi)
        else:
            dinv = param_derivative(inv, d, 1).real / d.speed
        phi.setflags(write=False)
        dinv.setflags(write=False)
        return cls(phi, dinv, d.domain_id, label)

    def reciprocal(self, d: DomainGeometry) -> "WeightField":
        return WeightField.from_samples(d, 1.0 / self.phi, f"1/({self.label})")

    def scaled(self, d: DomainGeometry, c: float) -> "WeightField":
        return WeightField.from_samples(d, c * self.phi, f"{c!r}*({self.label})")


def constant_weight(d: DomainGeometry, c: float = 1.0) -> WeightField:
    return WeightField.from_samples(d, np.full(d.total_nodes, float(c)), f"constant({c!r})")


def exp_cos_weight(d: DomainGeometry, scale: float = 1.0, components="outer") -> WeightField:
    """phi = exp(scale * cos t) on the chosen components, 1 elsewhere.

    `components` is ``"outer"``, ``"all"`` or a list of component indices.
    """
    if components == "outer":
        chosen = [0]
    elif components == "all":
        chosen = list(range(d.connectivity))
    else:
        chosen = list(components)
    phi = np.ones(d.total_nodes)
    for i, s in enumerate(d.slices()):
        if i in chosen:
            phi[s] = np.exp(scale * np.cos(d.components[i].t))
    return WeightField.from_samples(d, phi, f"exp-cos({scale!r},{components})")


def abs2_weight(d: DomainGeometry, center: complex = 2.0, power: float = 1.0) -> WeightField:
    """phi = |z - center|^(2*power); center must lie off the closed domain."""
    phi = np.abs(d.z - center) ** (2.0 * power)
    return WeightField.from_samples(d, phi, f"abs2({complex(center)!r},{power!r})")


def make_weight(d: DomainGeometry, family: str, params=()) -> WeightField:
    """Named weights used by configs: constant, exp-cos, abs2."""
    p = [float(x) for x in params]
    if family == "constant":
        return constant_weight(d, p[0] if p else 1.0)
    if family == "exp-cos":
        scale = p[0] if p else 1.0
        which = "all" if len(p) > 1 and p[1] else "outer"
        return exp_cos_weight(d, scale, which)
    if family in ("abs2", "poly-abs2"):
        center = complex(p[0], p[1]) if len(p) >= 2 else 2.0
        power = p[2] if len(p) >= 3 else 1.0
        return abs2_weight(d, center, power)
    raise ValueError(f"unknown weight family {family!r}")


# --------------------------------------------------------------- functionals


def weighted_inner(u, v, w: WeightField, d: DomainGeometry) -> complex:
    """Trapezoid value of <u, v>_phi = integral of u conj(v) phi ds."""
    if w.domain_id != d.domain_id:
        raise DomainMismatchError("weight belongs to a different domain")
    uu, vv = _values(u, d), _values(v, d)
    return complex(np.sum(uu * np.conj(vv) * w.phi * d.arc_weights))


def contour_integral(values, d: DomainGeometry) -> complex:
    """Integral of f dz over the positively oriented boundary."""
    return complex(np.sum(_values(values, d) * d.dz * d.h))


def _spacing_at(d: DomainGeometry, p: complex) -> float:
    return float(d.arc_weights[d.nearest_node(p)])


def _require_inside(d: DomainGeometry, p: complex, what: str) -> None:
    if winding_number(d, p) != 1:
        raise NotInDomainError(f"{what} {p} is not inside the domain")


def cauchy_kernel_field(a: complex, d: DomainGeometry) -> BoundaryField:
    """Samples of C_a(z) = conj(T(z) / (2 pi i (z - a)))."""
    a = complex(a)
    _require_inside(d, a, "pole")
    if boundary_distance(d, a) < 3 * _spacing_at(d, a):
        warnings.warn(
            f"pole {a} is within 3 node spacings of the boundary", NearBoundaryWarning, stacklevel=2
        )
    vals = np.conj(d.tangent / (2j * math.pi * (d.z - a)))
    return BoundaryField(vals, d.domain_id)


def cauchy_weights(zp, d: DomainGeometry) -> np.ndarray:
    """Rows r_j(zp) = z'(t_j) h / (2 pi i (z_j - zp)), shape (len(zp), N)."""
    zp = np.atleast_1d(np.asarray(zp, dtype=complex))
    return (d.dz * d.h)[None, :] / (2j * math.pi * (d.z[None, :] - zp[:, None]))


def cauchy_apply(values, zp, d: DomainGeometry, check: bool = True) -> np.ndarray:
    """Vectorized interior Cauchy integral of one or more boundary sample rows.

    Uses the barycentric form sum(r u) / sum(r): the denominator is the
    trapezoid value of the Cauchy integral of 1, which equals 1 exactly
    inside the domain, and dividing by it cancels most of the quadrature
    error for points close to the boundary.
    """
    zp = np.atleast_1d(np.asarray(zp, dtype=complex))
    if check:
        for p in zp:
            _require_inside(d, complex(p), "evaluation point")
            if boundary_distance(d, p) < 5 * _spacing_at(d, p):
                warnings.warn(
                    f"point {complex(p)} is within 5 node spacings of the boundary",
                    NearBoundaryWarning,
                    stacklevel=3,
                )
    r = cauchy_weights(zp, d)
    u = _values(values, d)
    num = u @ r.T if u.ndim > 1 else r @ u
    return num / r.sum(axis=1)


def cauchy_interior(u: BoundaryField, zp: complex, d: DomainGeometry) -> complex:
    """(1/2 pi i) * integral of u(zeta) / (zeta - zp) dzeta for zp inside."""
    return complex(cauchy_apply(u, zp, d)[0])


def field_to_rows(u: BoundaryField, d: DomainGeometry) -> list[tuple]:
    """Rows (component, node, t, re, im) for CSV export."""
    v = check_field(u, d)
    rows = []
    for ci, s in enumerate(d.slices()):
        t = d.components[ci].t
        for k, (tk, val) in enumerate(zip(t, v[s])):
            rows.append((ci, k, float(tk), float(val.real), float(val.imag)))
    return rows


def weight_to_rows(w: WeightField, d: DomainGeometry) -> list[tuple]:
    rows = []
    for ci, s in enumerate(d.slices()):
        t = d.components[ci].t
        for k, (tk, p, dv) in enumerate(zip(t, w.phi[s], w.dinv_ds[s])):
            rows.append((ci, k, float(tk), float(p), float(dv)))
    return rows
