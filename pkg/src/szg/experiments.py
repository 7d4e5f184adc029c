"""Weight-sweep convergence studies for the weighted kernels.

Every study runs a family of weights phi_k -> phi_inf over k = 1..kmax on a
fixed finite set of evaluation points and records sup errors per k. Results
are deterministic: no randomness is used anywhere.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import WeightField, abs2_weight, constant_weight, cs_norm, exp_cos_weight
from .geometry import DomainGeometry, boundary_distance, default_pole
from .kernels import l_regular_interior, zero_count, zero_locate
from .kerzman_stein import solver_for

FAMILIES = ("exp-cos", "poly-abs2", "constant-blend")


@dataclass(frozen=True)
class WeightFamily:
    """phi_k for k >= 1 with limit phi_inf = 1.

    exp-cos:        exp(scale * cos(t) / k) on the outer curve (1 on holes)
    poly-abs2:      |zeta - c|^(2/k)
    constant-blend: 1 + 1/k
    """

    family_id: str
    scale: float = 1.0
    center: complex = 2.0
    components: str = "outer"

    def __post_init__(self):
        if self.family_id not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family_id!r}")

    def weight(self, d: DomainGeometry, k: int) -> WeightField:
        if k < 1:
            raise ValueError("k starts at 1")
        if self.family_id == "exp-cos":
            return exp_cos_weight(d, self.scale / k, self.components)
        if self.family_id == "poly-abs2":
            return abs2_weight(d, self.center, 1.0 / k)
        return constant_weight(d, 1.0 + 1.0 / k)

    def limit(self, d: DomainGeometry) -> WeightField:
        return constant_weight(d, 1.0)

    def distance_to_limit(self, d: DomainGeometry, k: int, s: int) -> float:
        diff = self.weight(d, k).phi - self.limit(d).phi
        return cs_norm(d.field(diff), s, d)


# ------------------------------------------------------------------ grids


def default_points(d: DomainGeometry, count: int = 6, min_distance: float = 0.1) -> list[complex]:
    """Deterministic interior points at least `min_distance` * scale from the boundary."""
    center = complex(np.mean(d.components[0].z))
    pts = []
    for r in (0.3, 0.55, 0.75, 0.15):
        for j in range(8):
            p = center + r * d.scale * complex(math.cos(0.4 + j * math.pi / 4), math.sin(0.4 + j * math.pi / 4))
            if d.contains(p) and boundary_distance(d, p) >= min_distance * d.scale:
                pts.append(p)
    if len(pts) < 2:
        raise ValueError("could not place evaluation points")
    # spread the selection over the candidate list
    idx = np.unique(np.linspace(0, len(pts) - 1, min(count, len(pts))).round().astype(int))
    return [pts[i] for i in idx]


def default_pairs(d: DomainGeometry, count: int = 6) -> list[tuple[complex, complex]]:
    pts = default_points(d, count)
    return [(pts[i], pts[j]) for i in range(len(pts)) for j in range(i, len(pts))]


def grid_id(items) -> str:
    text = ";".join(repr(x) for x in items)
    return hashlib.sha1(text.encode()).hexdigest()[:12]


# ----------------------------------------------------------------- reports


@dataclass
class ConvergenceReport:
    kind: str
    family_id: str
    domain_id: str
    grid: list
    location: str
    ks: list[int]
    errors: list[float]
    predicted: list[float] | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(e < 0 or not math.isfinite(e) for e in self.errors):
            raise ValueError("errors must be finite and nonnegative")

    @property
    def grid_id(self) -> str:
        return grid_id(self.grid)

    @property
    def ratio(self) -> float:
        """final error / initial error."""
        return self.errors[-1] / self.errors[0] if self.errors[0] > 0 else 0.0

    def tail_monotone(self, slack: float = 1e-13) -> bool:
        """Errors nonincreasing for k >= kmax / 2 (up to round-off `slack`)."""
        kmax = self.ks[-1]
        tail = [e for k, e in zip(self.ks, self.errors) if k >= kmax / 2]
        return all(b <= a + slack for a, b in zip(tail, tail[1:]))

    @property
    def slope(self) -> float:
        """Least-squares slope of log(error) against log(k) over the tail."""
        kmax = self.ks[-1]
        pts = [(math.log(k), math.log(e)) for k, e in zip(self.ks, self.errors) if k >= kmax / 2 and e > 0]
        if len(pts) < 2:
            return float("nan")
        x, y = np.array(pts).T
        return float(np.polyfit(x, y, 1)[0])

    def max_prediction_gap(self) -> float:
        if self.predicted is None:
            return float("nan")
        return max(abs(a - b) for a, b in zip(self.errors, self.predicted))

    def rows(self) -> list[tuple]:
        gid = self.grid_id
        return [(k, e, gid) for k, e in zip(self.ks, self.errors)]


def _ks(kmax: int) -> list[int]:
    if kmax < 2:
        raise ValueError("kmax must be at least 2")
    return list(range(1, kmax + 1))


def _szego_pairs(d: DomainGeometry, w: WeightField, pairs) -> np.ndarray:
    """S_w(z, a) for (z, a) pairs, one solve per distinct a."""
    solver = solver_for(d, w)
    out = np.empty(len(pairs), dtype=complex)
    by_pole: dict[complex, list[int]] = {}
    for i, (_, a) in enumerate(pairs):
        by_pole.setdefault(complex(a), []).append(i)
    solver.solve_many(list(by_pole))
    for a, idx in by_pole.items():
        out[idx] = solver.S([pairs[i][0] for i in idx], a)
    return out


def _check_interior(d: DomainGeometry, pts, min_distance: float) -> None:
    for p in pts:
        if not d.contains(p) or boundary_distance(d, p) < min_distance:
            raise ValueError(f"grid point {p} is not at distance >= {min_distance} inside the domain")


def ramadanov_interior(fam: WeightFamily, d: DomainGeometry, kmax: int = 16, grid=None) -> ConvergenceReport:
    """sup over interior pairs of |S_k(z, w) - S_inf(z, w)|."""
    pairs = default_pairs(d) if grid is None else [(complex(z), complex(w)) for z, w in grid]
    _check_interior(d, [p for pr in pairs for p in pr], 0.1)
    ref = _szego_pairs(d, fam.limit(d), pairs)
    ks, errs, pred = _ks(kmax), [], []
    for k in ks:
        vals = _szego_pairs(d, fam.weight(d, k), pairs)
        errs.append(float(np.max(np.abs(vals - ref))))
        pred.append(float(np.max(np.abs(ref))) / (k + 1))
    predicted = pred if fam.family_id == "constant-blend" else None
    return ConvergenceReport("interior", fam.family_id, d.domain_id, pairs, "interior-interior", ks, errs, predicted)


def _closure_values(d: DomainGeometry, w: WeightField, zs, nodes) -> np.ndarray:
    """S_w(z, w0) at boundary node w0, as conj of the node sample of the solve with pole z."""
    sols = solver_for(d, w).solve_many(zs)
    return np.array([np.conj(s.values[j]) for s, j in zip(sols, nodes)])


def default_closure_pairs(d: DomainGeometry, component: int = 0, count: int = 4) -> list[tuple[complex, int]]:
    pts = default_points(d, count)
    s = d.slices()[component]
    n = s.stop - s.start
    nodes = [s.start + (j * n) // len(pts) for j in range(len(pts))]
    return list(zip(pts, nodes))


def ramadanov_closure(fam: WeightFamily, d: DomainGeometry, kmax: int = 16, grid=None) -> ConvergenceReport:
    """sup over (interior z, boundary node w0) of |S_k(z, w0) - S_inf(z, w0)|."""
    pairs = default_closure_pairs(d) if grid is None else [(complex(z), int(j)) for z, j in grid]
    _check_interior(d, [z for z, _ in pairs], 0.0)
    zs, nodes = [z for z, _ in pairs], [j for _, j in pairs]
    ref = _closure_values(d, fam.limit(d), zs, nodes)
    ks, errs, pred = _ks(kmax), [], []
    for k in ks:
        vals = _closure_values(d, fam.weight(d, k), zs, nodes)
        errs.append(float(np.max(np.abs(vals - ref))))
        pred.append(float(np.max(np.abs(ref))) / (k + 1))
    predicted = pred if fam.family_id == "constant-blend" else None
    return ConvergenceReport("closure", fam.family_id, d.domain_id, pairs, "interior-boundary", ks, errs, predicted)


def boundary_point_convergence(fam: WeightFamily, d: DomainGeometry, w0_node: int, zgrid=None,
                               kmax: int = 16, limit_values=None) -> ConvergenceReport:
    """sup over z of |S_k(z, w0) - S(z, w0)| for one boundary node w0.

    `limit_values` may supply closed-form S(z, w0); otherwise the limit is
    computed with the constant weight 1.
    """
    w0 = d.z[w0_node]
    if zgrid is None:
        zgrid = [p for p in default_points(d, 8) if abs(p - w0) >= 0.2]
    zgrid = [complex(z) for z in zgrid]
    if any(abs(z - w0) < 0.2 for z in zgrid):
        raise ValueError("zgrid must stay 0.2 away from the boundary point")
    _check_interior(d, zgrid, 0.0)
    nodes = [w0_node] * len(zgrid)
    ref = (np.asarray(limit_values, dtype=complex) if limit_values is not None
           else _closure_values(d, constant_weight(d, 1.0), zgrid, nodes))
    ks, errs = _ks(kmax), []
    for k in ks:
        vals = _closure_values(d, fam.weight(d, k), zgrid, nodes)
        errs.append(float(np.max(np.abs(vals - ref))))
    grid = [(z, w0_node) for z in zgrid]
    return ConvergenceReport("boundary-point", fam.family_id, d.domain_id, grid, "interior-boundary", ks, errs)


def garabedian_convergence(fam: WeightFamily, d: DomainGeometry, kmax: int = 16, grid=None) -> ConvergenceReport:
    """sup over interior pairs of |l_k(z, a) - l_inf(z, a)|, l from l_regular_interior."""
    pairs = default_pairs(d, 4) if grid is None else [(complex(z), complex(a)) for z, a in grid]
    pairs = [(z, a) for z, a in pairs if z != a]
    _check_interior(d, [p for pr in pairs for p in pr], 0.1)

    def values(w):
        return np.array([l_regular_interior(a, z, d, w)[0] for z, a in pairs])

    ref = values(fam.limit(d))
    ks, errs = _ks(kmax), []
    for k in ks:
        errs.append(float(np.max(np.abs(values(fam.weight(d, k)) - ref))))
    return ConvergenceReport("garabedian", fam.family_id, d.domain_id, pairs, "interior-interior", ks, errs)


# ------------------------------------------------------------- zero study


@dataclass
class ZeroTrackingRow:
    k: int
    count: int
    zeros: list[complex]
    distance: float


@dataclass
class ZeroTracking:
    family_id: str
    domain_id: str
    pole: complex
    expected: int
    limit_zeros: list[complex]
    rows: list[ZeroTrackingRow]

    @property
    def k0(self) -> int | None:
        """Smallest k from which every tested count equals n - 1."""
        k0 = None
        for row in reversed(self.rows):
            if row.count != self.expected:
                break
            k0 = row.k
        return k0


def hausdorff(a: list[complex], b: list[complex]) -> float:
    if not a and not b:
        return 0.0
    if not a or not b:
        return float("inf")
    A, B = np.array(a), np.array(b)
    D = np.abs(A[:, None] - B[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def zero_tracking(fam: WeightFamily, d: DomainGeometry, a: complex | None = None, kmax: int = 16,
                  ks=None) -> ZeroTracking:
    a = default_pole(d) if a is None else complex(a)
    lim_w = fam.limit(d)
    lim = zero_locate(solver_for(d, lim_w).solve(a), d, lim_w)
    rows = []
    for k in (ks or _ks(kmax)):
        w = fam.weight(d, k)
        sol = solver_for(d, w).solve(a)
        count = zero_count(sol, d)
        zs = zero_locate(sol, d, w) if count else []
        rows.append(ZeroTrackingRow(k, count, zs, hausdorff(zs, lim)))
    return ZeroTracking(fam.family_id, d.domain_id, a, d.connectivity - 1, lim, rows)


# ----------------------------------------------------------- exploratory


def exploratory_boundary_pairs(fam: WeightFamily, d: DomainGeometry, node0: int, node1: int,
                               kmax: int = 16, eps=(0.05, 0.02, 0.01)) -> dict:
    """Record |S_k(w0, a_eps) - S(w0, a_eps)| with a_eps approaching the boundary node w1.

    Both arguments end up on the boundary, which no convergence result
    covers; the numbers are recorded for inspection and nothing is asserted.
    """
    w1 = d.z[node1]
    normal_in = 1j * d.tangent[node1]
    table = {}
    for e in eps:
        a = complex(w1 + e * d.scale * normal_in)
        ref = solver_for(d, fam.limit(d)).solve(a).values[node0]
        table[e] = [float(abs(solver_for(d, fam.weight(d, k)).solve(a).values[node0] - ref))
                    for k in _ks(kmax)]
    return {"kind": "exploratory-boundary", "family": fam.family_id, "domain": d.domain_id,
            "nodes": (node0, node1), "ks": _ks(kmax), "errors_by_eps": table}
