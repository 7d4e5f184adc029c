"""Smooth boundary curves of bounded n-connected planar domains.

Every component is sampled at equispaced parameter values on [0, 2*pi), so
the periodic trapezoid rule is the quadrature used throughout the package.
Component 0 is the outer boundary (counterclockwise); all remaining
components are hole boundaries traversed clockwise, which makes the full
boundary positively oriented with respect to the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

POSITIVE = "positive"
NEGATIVE = "negative"

PRESETS = ("disc", "ellipse", "smooth-star", "annulus", "circle-holes")

# hole layout used when `circle-holes` is requested without params:
# outer radius, then (center_re, center_im, radius) per hole
DEFAULT_CIRCLE_HOLES = (1.0, 0.4, 0.0, 0.2, -0.4, 0.0, 0.2)


class GeometryError(ValueError):
    """Invalid preset, parameters or node count."""


class BoundaryProximityError(ValueError):
    """A query point sits (numerically) on the boundary."""


@dataclass(frozen=True, eq=False)
class CurveComponent:
    t: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    ddz: np.ndarray
    orientation: str
    # a point strictly inside the hole this curve bounds (None for the outer curve)
    hole_point: complex | None = None

    @property
    def n(self) -> int:
        return self.t.size

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.t.size

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @property
    def tangent(self) -> np.ndarray:
        return self.dz / np.abs(self.dz)

    @property
    def curvature(self) -> np.ndarray:
        """Signed curvature Im(conj(z') z'') / |z'|^3 along the parametrization."""
        return np.imag(np.conj(self.dz) * self.ddz) / np.abs(self.dz) ** 3

    def signed_area(self) -> float:
        x, y = self.z.real, self.z.imag
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def winding(self, p: complex) -> int:
        return loop_winding(self.z, p)


def loop_winding(loop: np.ndarray, p: complex) -> int:
    """Winding number of the closed polygon through `loop` around `p`."""
    w = loop - p
    dtheta = np.angle(np.roll(w, -1) / w)
    return int(round(float(np.sum(dtheta)) / (2.0 * math.pi)))


@dataclass(frozen=True, eq=False)
class DomainGeometry:
    components: tuple[CurveComponent, ...]
    preset: str = "custom"
    params: tuple[float, ...] = ()
    nodes_per_component: int = 0
    z: np.ndarray = field(init=False, repr=False)
    dz: np.ndarray = field(init=False, repr=False)
    ddz: np.ndarray = field(init=False, repr=False)
    h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cat = lambda name: np.concatenate([getattr(c, name) for c in self.components])
        object.__setattr__(self, "z", cat("z"))
        object.__setattr__(self, "dz", cat("dz"))
        object.__setattr__(self, "ddz", cat("ddz"))
        object.__setattr__(
            self, "h", np.concatenate([np.full(c.n, c.h) for c in self.components])
        )
        for arr in (self.z, self.dz, self.ddz, self.h):
            arr.setflags(write=False)

    @property
    def domain_id(self) -> str:
        params = ",".join(repr(float(p)) for p in self.params)
        return f"{self.preset}[{params}]x{self.nodes_per_component}"

    @property
    def connectivity(self) -> int:
        return len(self.components)

    @property
    def total_nodes(self) -> int:
        return int(self.z.size)

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @property
    def tangent(self) -> np.ndarray:
        return self.dz / np.abs(self.dz)

    @property
    def arc_weights(self) -> np.ndarray:
        """Trapezoid weights for ds: |z'(t_i)| * 2*pi/N_c."""
        return np.abs(self.dz) * self.h

    @property
    def t(self) -> np.ndarray:
        return np.concatenate([c.t for c in self.components])

    @property
    def component_index(self) -> np.ndarray:
        return np.concatenate([np.full(c.n, i) for i, c in enumerate(self.components)])

    def slices(self) -> list[slice]:
        out, start = [], 0
        for c in self.components:
            out.append(slice(start, start + c.n))
            start += c.n
        return out

    @property
    def hole_points(self) -> list[complex]:
        return [c.hole_point for c in self.components[1:]]

    @property
    def scale(self) -> float:
        """Radius of the outer curve about its node centroid."""
        zo = self.components[0].z
        return float(np.max(np.abs(zo - zo.mean())))

    def node_spacing(self) -> np.ndarray:
        return self.arc_weights

    def nearest_node(self, p: complex) -> int:
        return int(np.argmin(np.abs(self.z - p)))

    def contains(self, p: complex) -> bool:
        try:
            return winding_number(self, p) == 1
        except BoundaryProximityError:
            return False

    def field(self, values):
        from .boundary import BoundaryField

        return BoundaryField(np.asarray(values, dtype=complex), self.domain_id)

    def sample(self, func) -> "BoundaryField":
        """Evaluate a vectorized function of z at every node."""
        return self.field(func(self.z))


def winding_number(domain: DomainGeometry, p: complex) -> int:
    """Total winding of the boundary around `p` (1 inside, 0 outside)."""
    if np.min(np.abs(domain.z - p)) < 1e-9:
        raise BoundaryProximityError(f"point {p} lies within 1e-9 of a boundary node")
    return sum(c.winding(p) for c in domain.components)


def winding_numbers(domain: DomainGeometry, pts, chunk: int = 2048) -> np.ndarray:
    """Vectorized total winding of the node polygons for many points; no proximity check."""
    pts = np.ravel(np.asarray(pts, dtype=complex))
    loops = [c.z for c in domain.components]
    out = np.zeros(pts.size, dtype=int)
    for start in range(0, pts.size, chunk):
        p = pts[start : start + chunk, None]
        total = np.zeros(p.shape[0])
        for loop in loops:
            w = loop[None, :] - p
            total += np.sum(np.angle(np.roll(w, -1, axis=1) / w), axis=1)
        out[start : start + chunk] = np.rint(total / (2.0 * math.pi)).astype(int)
    return out


def inside_near_boundary(domain: DomainGeometry, pts, iterations: int = 4) -> np.ndarray:
    """Membership of points close to the boundary, decided against the smooth curve.

    Each point is projected onto the trigonometric interpolant of its nearest
    component (Newton on the foot-point condition, started at the nearest
    node); it is inside iff it lies to the left of the tangent there.
    """
    pts = np.ravel(np.asarray(pts, dtype=complex))
    out = np.zeros(pts.size, dtype=bool)
    idx = np.empty(pts.size, dtype=int)
    for s in range(0, pts.size, 2048):
        idx[s : s + 2048] = np.argmin(np.abs(pts[s : s + 2048, None] - domain.z[None, :]), axis=1)
    comp = domain.component_index[idx]
    starts = np.cumsum([0] + [c.n for c in domain.components])
    for ci, c in enumerate(domain.components):
        sel = np.nonzero(comp == ci)[0]
        if sel.size == 0:
            continue
        n = c.n
        coef = np.fft.fft(c.z) / n
        coef[n // 2] = 0.0
        k = np.fft.fftfreq(n, 1.0 / n)
        basis = np.column_stack([coef, 1j * k * coef, -(k**2) * coef])
        for s in range(0, sel.size, 1024):
            part = sel[s : s + 1024]
            p = pts[part]
            t = c.t[idx[part] - starts[ci]]
            for _ in range(iterations):
                z, dz, ddz = (np.exp(1j * np.outer(t, k)) @ basis).T
                g = np.real(np.conj(z - p) * dz)
                gp = np.abs(dz) ** 2 + np.real(np.conj(z - p) * ddz)
                t = t - g / gp
            z, dz, _ = (np.exp(1j * np.outer(t, k)) @ basis).T
            out[part] = np.imag(np.conj(dz) * (p - z)) > 0
    return out


def boundary_distance(domain: DomainGeometry, p: complex) -> float:
    """Distance from `p` to the nearest boundary node.

    This is a node-resolution approximation: the true distance to the curve
    can be smaller by up to about half a node spacing.
    """
    return float(np.min(np.abs(domain.z - p)))


# ---------------------------------------------------------------- presets


def _nodes(n: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


def _circle(n: int, center: complex, radius: float, sign: int, hole_point=None):
    t = _nodes(n)
    e = np.exp(sign * 1j * t)
    return CurveComponent(
        t=t,
        z=center + radius * e,
        dz=sign * 1j * radius * e,
        ddz=-radius * e,
        orientation=POSITIVE if sign > 0 else NEGATIVE,
        hole_point=hole_point,
    )


def _ellipse(n: int, a: float, b: float) -> CurveComponent:
    t = _nodes(n)
    return CurveComponent(
        t=t,
        z=a * np.cos(t) + 1j * b * np.sin(t),
        dz=-a * np.sin(t) + 1j * b * np.cos(t),
        ddz=-a * np.cos(t) - 1j * b * np.sin(t),
        orientation=POSITIVE,
    )


def _star(n: int, radius: float, eps: float, lobes: int) -> CurveComponent:
    t = _nodes(n)
    r = radius * (1.0 + eps * np.cos(lobes * t))
    dr = -radius * eps * lobes * np.sin(lobes * t)
    ddr = -radius * eps * lobes**2 * np.cos(lobes * t)
    e = np.exp(1j * t)
    return CurveComponent(
        t=t,
        z=r * e,
        dz=(dr + 1j * r) * e,
        ddz=(ddr + 2j * dr - r) * e,
        orientation=POSITIVE,
    )


def make_preset(
    name: str, params: Sequence[float] = (), nodes_per_component: int = 256
) -> DomainGeometry:
    """Build one of the preset domains.

    Presets and their parameter lists:

    * ``disc``: ``[R]`` or ``[R, cx, cy]``; default ``[1]``.
    * ``ellipse``: ``[a, b]`` semi-axes; default ``[1, 0.6]``.
    * ``smooth-star``: ``[R, eps, lobes]``, r(t) = R(1 + eps cos(lobes t));
      default ``[1, 0.2, 5]``.
    * ``annulus``: ``[R, rho]`` with 0 < rho < R; default ``[1, 0.5]``.
    * ``circle-holes``: ``[R, c1x, c1y, r1, c2x, c2y, r2, ...]``, a disc of
      radius R with circular holes; default ``DEFAULT_CIRCLE_HOLES``.
    """
    n = nodes_per_component
    if name not in PRESETS:
        raise GeometryError(f"unknown preset {name!r}; expected one of {PRESETS}")
    if int(n) != n or n < 16 or n % 2:
        raise GeometryError(f"nodes per component must be even and >= 16, got {n}")
    n = int(n)
    p = [float(x) for x in params]

    if name == "disc":
        p = p or [1.0]
        if len(p) not in (1, 3) or p[0] <= 0:
            raise GeometryError("disc params are [R] or [R, cx, cy] with R > 0")
        center = complex(p[1], p[2]) if len(p) == 3 else 0j
        comps = [_circle(n, center, p[0], 1)]
    elif name == "ellipse":
        p = p or [1.0, 0.6]
        if len(p) != 2 or min(p) <= 0:
            raise GeometryError("ellipse params are [a, b] with a, b > 0")
        comps = [_ellipse(n, p[0], p[1])]
    elif name == "smooth-star":
        p = p or [1.0, 0.2, 5.0]
        if len(p) != 3 or p[0] <= 0 or not 0 <= p[1] < 1 or p[2] != int(p[2]) or p[2] < 1:
            raise GeometryError("smooth-star params are [R, eps, lobes], 0 <= eps < 1")
        comps = [_star(n, p[0], p[1], int(p[2]))]
    elif name == "annulus":
        p = p or [1.0, 0.5]
        if len(p) != 2 or p[0] <= 0 or not 0 < p[1] < p[0]:
            raise GeometryError("annulus params are [R, rho] with 0 < rho < R")
        comps = [_circle(n, 0j, p[0], 1), _circle(n, 0j, p[1], -1, hole_point=0j)]
    else:
        p = p or list(DEFAULT_CIRCLE_HOLES)
        if len(p) < 4 or (len(p) - 1) % 3 or p[0] <= 0:
            raise GeometryError("circle-holes params are [R, (cx, cy, r)...]")
        R = p[0]
        holes = [(complex(p[i], p[i + 1]), p[i + 2]) for i in range(1, len(p), 3)]
        for c, r in holes:
            if r <= 0 or abs(c) + r >= R:
                raise GeometryError(f"hole at {c} radius {r} is not inside the outer circle")
        for i in range(len(holes)):
            for j in range(i + 1, len(holes)):
                (ci, ri), (cj, rj) = holes[i], holes[j]
                if abs(ci - cj) <= ri + rj:
                    raise GeometryError(f"holes {i} and {j} overlap")
        comps = [_circle(n, 0j, R, 1)] + [_circle(n, c, r, -1, hole_point=c) for c, r in holes]

    domain = DomainGeometry(tuple(comps), name, tuple(p), n)
    _validate(domain)
    return domain


def _validate(domain: DomainGeometry) -> None:
    comps = domain.components
    for i, c in enumerate(comps):
        if np.min(np.abs(c.dz)) <= 0:
            raise GeometryError(f"component {i} is not a regular curve")
        expected = POSITIVE if i == 0 else NEGATIVE
        if c.orientation != expected or (c.signed_area() > 0) != (expected == POSITIVE):
            raise GeometryError(f"component {i} has the wrong orientation")
    outer = comps[0]
    for i, c in enumerate(comps[1:], start=1):
        if any(loop_winding(outer.z, p) != 1 for p in c.z):
            raise GeometryError(f"hole {i} is not inside the outer boundary")
        for j, other in enumerate(comps[1:], start=1):
            if j != i and any(loop_winding(other.z, p) != 0 for p in c.z):
                raise GeometryError(f"holes {i} and {j} intersect")


def fourier_tail(component: CurveComponent) -> float:
    """Ratio of the Nyquist-end Fourier coefficients of z to the largest one.

    Small values witness that the node set resolves a smooth closed curve.
    """
    c = np.abs(np.fft.fft(component.z)) / component.n
    n = component.n
    band = c[n // 2 - 2 : n // 2 + 3]
    return float(band.max() / c.max())


def default_pole(domain: DomainGeometry, fraction: float = 0.15) -> complex:
    """Interior point at distance ``fraction * scale`` inside the outer curve.

    The point is placed along the inward normal at the outer node t = 0,
    which sits on the real axis for every preset. Presets are symmetric under
    conjugation, as is the exp-cos weight, so with this pole the zero set of
    S(., a) keeps that symmetry as the weight varies.
    """
    outer = domain.components[0]
    i = 0
    normal_in = 1j * outer.tangent[i]
    p = complex(outer.z[i] + fraction * domain.scale * normal_in)
    if not domain.contains(p):
        raise GeometryError("default pole fell outside the domain")
    return p
