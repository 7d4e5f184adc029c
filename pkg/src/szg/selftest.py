"""Oracle battery run by ``szg selftest``.

Every check compares a solver output with a closed form, a series, or an
identity that must hold exactly, and reports (value, tolerance).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracles
from .bergman import make_bergman, higher_reduced
from .boundary import abs2_weight, exp_cos_weight
from .experiments import WeightFamily, ramadanov_interior
from .geometry import default_pole, make_preset
from .kernels import (
    ahlfors_map,
    boundary_identity_residual,
    garabedian_from_szego,
    interpolation_residual,
    reflection_identity_residual,
    reproducing_residual,
    unit_weight,
    zero_count,
    zero_locate,
)
from .kerzman_stein import assemble_ks, solver_for


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)


def _disc_closed_form():
    d = make_preset("disc", (1.0,), 128)
    s = solver_for(d, unit_weight(d)).solve(0.3).values
    return float(np.max(np.abs(s - oracles.disc_szego(d.z, 0.3)))), 1e-10


def _disc_factorization():
    d = make_preset("disc", (1.0,), 128)
    w = abs2_weight(d, 2.0)
    err = 0.0
    for a in (0.0, 0.3, 0.5j):
        s = solver_for(d, w).solve(a).values
        err = max(err, float(np.max(np.abs(s - oracles.disc_abs2_szego(d.z, a)))))
    return err, 1e-8


def _annulus_laurent():
    d = make_preset("annulus", (1.0, 0.5), 256)
    solver = solver_for(d, unit_weight(d))
    s = solver.solve(0.7).values
    err = float(np.max(np.abs(s - oracles.annulus_szego(d.z, 0.7, 0.5))))
    pts = np.array([0.6j, -0.8, 0.7])
    err = max(err, float(np.max(np.abs(solver.S(pts, 0.7) - oracles.annulus_szego(pts, 0.7, 0.5)))))
    return err, 1e-8


def _ks_structure():
    d = make_preset("ellipse", (1.0, 0.6), 128)
    return assemble_ks(d, exp_cos_weight(d, 1.0)).skew_defect(), 1e-12


def _ks_singular():
    d = make_preset("annulus", (1.0, 0.5), 128)
    return max(0.0, 1.0 - solver_for(d, exp_cos_weight(d, 1.0)).symmetrized_singular_min()), 1e-8


def _diagonal():
    d = make_preset("disc", (1.0,), 64)
    w = exp_cos_weight(d, 1.0)
    m = assemble_ks(d, w)
    zf = lambda t: np.exp(1j * t)
    dzf = lambda t: 1j * np.exp(1j * t)
    phif = lambda t: np.exp(np.cos(t))
    err = 0.0
    for i in range(0, 64, 8):
        err = max(err, abs(m.entries[i, i] - oracles.ks_diagonal_limit(d.t[i], zf, dzf, phif)))
    return float(err), 1e-6


def _boundary_identity():
    err = 0.0
    for name in ("disc", "annulus", "circle-holes"):
        d = make_preset(name, (), 256)
        w = exp_cos_weight(d, 1.0)
        sol = solver_for(d, w).solve(default_pole(d))
        err = max(err, boundary_identity_residual(sol, garabedian_from_szego(sol, d, w), d, w))
    return err, 1e-8


def _reflection():
    err = 0.0
    for name in ("disc", "annulus", "circle-holes"):
        d = make_preset(name, (), 256)
        err = max(err, reflection_identity_residual(default_pole(d), 0.1 - 0.6j, d, exp_cos_weight(d, 1.0)))
    return err, 1e-7


def _reproducing():
    d = make_preset("annulus", (1.0, 0.5), 256)
    w = exp_cos_weight(d, 1.0)
    sol = solver_for(d, w).solve(0.7)
    funcs = [lambda z: z**3, lambda z: 1 / z, lambda z: 1 / (z - 3), lambda z: z**-2 + z]
    return max(reproducing_residual(sol, d.sample(f), complex(f(0.7)), d, w) for f in funcs), 1e-8


def _zeros():
    worst = 0
    for name, n in (("disc", 0), ("annulus", 1), ("circle-holes", 2)):
        d = make_preset(name, (), 256)
        for w in (unit_weight(d), exp_cos_weight(d, 0.25)):
            sol = solver_for(d, w).solve(default_pole(d))
            c = zero_count(sol, d)
            zs = zero_locate(sol, d, w) if c else []
            worst = max(worst, abs(c - n) + abs(len(zs) - n))
    return float(worst), 0.0


def _interpolation():
    d = make_preset("annulus", (1.0, 0.5), 256)
    f = ahlfors_map(d, 0.7)
    return interpolation_residual(d, unit_weight(d), f, 0.6j, -0.55), 1e-6


def _homogeneity():
    d = make_preset("annulus", (1.0, 0.5), 128)
    r = ramadanov_interior(WeightFamily("constant-blend"), d, kmax=4)
    return r.max_prediction_gap(), 1e-9


def _bergman():
    d = make_preset("disc", (1.0,), 128)
    bk = make_bergman(d)
    xs = np.linspace(-0.5, 0.5, 5)
    grid = (xs[None, :] + 1j * xs[:, None]).ravel()
    err = max(float(np.max(np.abs(bk.K(grid, w) - oracles.disc_bergman(grid, w)))) for w in (0.2, -0.3j))
    da = make_preset("annulus", (1.0, 0.5), 256)
    ba = make_bergman(da)
    err = max(err, abs(ba.reduced(0.6, -0.7)[0] - oracles.annulus_reduced_bergman(0.6, -0.7, 0.5)))
    return float(err), 1e-6


def _higher():
    d = make_preset("disc", (1.0,), 128)
    bk = make_bergman(d)
    return abs(higher_reduced(2, 0.5, 0.0, d, bk) - 1.0 / math.pi), 1e-6


CHECKS: dict[str, Callable] = {
    "disc-closed-form": _disc_closed_form,
    "weighted-disc-factorization": _disc_factorization,
    "annulus-laurent": _annulus_laurent,
    "ks-skew-defect": _ks_structure,
    "ks-singular-value": _ks_singular,
    "ks-diagonal-limit": _diagonal,
    "boundary-identity": _boundary_identity,
    "reflection-identity": _reflection,
    "reproducing-property": _reproducing,
    "zero-counts": _zeros,
    "interpolation-identity": _interpolation,
    "constant-blend-homogeneity": _homogeneity,
    "bergman-oracles": _bergman,
    "higher-order-disc": _higher,
}


def run_battery(names=None) -> list[CheckResult]:
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in names or CHECKS:
            try:
                value, tol = CHECKS[name]()
                out.append(CheckResult(name, float(value), float(tol)))
            except Exception as exc:  # a crash counts as a failed check
                out.append(CheckResult(name, float("inf"), 0.0, f"{type(exc).__name__}: {exc}"))
    return out
