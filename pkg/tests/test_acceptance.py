"""The thirteen acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import math
import time
import warnings

import numpy as np
import pytest

from szg import oracles
from szg.bergman import fprime_basis, gram_matrix, higher_reduced, make_bergman
from szg.boundary import NearBoundaryWarning, abs2_weight, constant_weight, exp_cos_weight
from szg.experiments import (
    WeightFamily,
    boundary_point_convergence,
    default_points,
    ramadanov_closure,
    ramadanov_interior,
)
from szg.geometry import PRESETS, default_pole, make_preset
from szg.kernels import (
    ahlfors_map,
    boundary_identity_residual,
    garabedian_from_szego,
    interpolation_residual,
    reflection_identity_residual,
    reproducing_residual,
    zero_count,
    zero_locate,
)
from szg.kerzman_stein import assemble_ks, solver_for

pytestmark = pytest.mark.acceptance

THREE = ("disc", "annulus", "circle-holes")


def sup(x):
    return float(np.max(np.abs(x)))


def test_01_disc_closed_form(criterion):
    start = time.perf_counter()
    d = make_preset("disc", [1.0], 128)
    s = solver_for(d, constant_weight(d)).solve(0.3).values
    elapsed = time.perf_counter() - start
    err = sup(s - oracles.disc_szego(d.z, 0.3))
    criterion("1 disc closed form", [("sup error", err, 1e-10), ("seconds", elapsed, 1.0)])


def test_02_weighted_disc_factorization(criterion):
    d = make_preset("disc", [1.0], 128)
    w = abs2_weight(d, 2.0)
    err = max(sup(solver_for(d, w).solve(a).values - oracles.disc_abs2_szego(d.z, a)) for a in (0, 0.3, 0.5j))
    criterion("2 weighted disc factorization", [("sup error", err, 1e-8)])


def test_03_annulus_laurent(criterion):
    d = make_preset("annulus", [1.0, 0.5], 256)
    solver = solver_for(d, constant_weight(d))
    bnd = sup(solver.solve(0.7).values - oracles.annulus_szego(d.z, 0.7, 0.5))
    pts = np.array(default_points(d, 8) + [0.7, -0.6, 0.75j])
    interior = sup(solver.S(pts, 0.7) - oracles.annulus_szego(pts, 0.7, 0.5))
    criterion("3 annulus Laurent oracle", [("boundary", bnd, 1e-8), ("interior", interior, 1e-8)])


def test_04_kerzman_stein_structure(criterion):
    skew = 0.0
    for name in PRESETS:
        d = make_preset(name, (), 128)
        for w in (constant_weight(d), exp_cos_weight(d, 1.0, "all"), abs2_weight(d, 3.0)):
            skew = max(skew, assemble_ks(d, w).skew_defect())
    disc = make_preset("disc", [1.0], 128)
    zero = sup(assemble_ks(disc, constant_weight(disc)).entries)
    sigma_gap = 0.0
    for name in PRESETS:
        d = make_preset(name, (), 128)
        sigma_gap = max(sigma_gap, 1.0 - solver_for(d, exp_cos_weight(d, 1.0, "all")).symmetrized_singular_min())
    d = make_preset("annulus", [1.0, 0.5], 256)
    sigma_gap = max(sigma_gap, 1.0 - solver_for(d, exp_cos_weight(d, 1.0)).symmetrized_singular_min())
    criterion("4 Kerzman-Stein structure",
              [("skew defect", skew, 1e-12), ("disc matrix", zero, 1e-12), ("1 - sigma_min", sigma_gap, 1e-8)])


def test_05_diagonal_formula(criterion):
    d = make_preset("disc", [1.0], 64)
    m = assemble_ks(d, exp_cos_weight(d, 1.0))
    zf = lambda t: np.exp(1j * t)
    dzf = lambda t: 1j * np.exp(1j * t)
    phif = lambda t: np.exp(np.cos(t))
    err = max(abs(m.entries[i, i] - oracles.ks_diagonal_limit(d.t[i], zf, dzf, phif)) for i in range(0, 64, 8))
    criterion("5 diagonal formula", [("max deviation", err, 1e-6)])


def test_06_boundary_identity_and_reflection(criterion):
    ident = refl = 0.0
    for name in THREE:
        d = make_preset(name, (), 256)
        w = exp_cos_weight(d, 1.0)
        a = default_pole(d)
        sol = solver_for(d, w).solve(a)
        ident = max(ident, boundary_identity_residual(sol, garabedian_from_szego(sol, d, w), d, w))
        for zp in (0.1 - 0.6j, -0.6 + 0.1j):
            refl = max(refl, reflection_identity_residual(a, zp, d, w))
    criterion("6 boundary identity and reflection", [("identity", ident, 1e-8), ("reflection", refl, 1e-7)])


def _battery(d):
    c = complex(np.mean(d.components[0].z))
    s = d.scale
    funcs = [
        lambda z: np.ones_like(z),
        lambda z: (z - c) ** 3 - 2 * (z - c),
        lambda z: (z - c) ** 7,
        lambda z: 1 / (z - c - 3 * s),
        lambda z: 1 / (z - c - 2.5j * s) ** 2,
        lambda z: (z - c + 0.5) / (z - c + 4 * s),
    ]
    # poles inside the holes are admissible on multiply connected domains
    for i, h in enumerate(d.hole_points):
        funcs[3 + i] = lambda z, h=h: 1 / (z - h)
    return funcs


def test_07_reproducing_battery(criterion):
    worst = 0.0
    for name in PRESETS:
        d = make_preset(name, (), 256)
        w = exp_cos_weight(d, 1.0)
        a = default_pole(d)
        sol = solver_for(d, w).solve(a)
        for f in _battery(d):
            ha = complex(f(np.array([a], dtype=complex))[0])
            worst = max(worst, reproducing_residual(sol, d.sample(f), ha, d, w))
    criterion("7 reproducing property", [("max residual", worst, 1e-8)])


def test_08_zero_counts(criterion):
    count_err, located = 0, 0.0
    for name, n in (("disc", 0), ("annulus", 1), ("circle-holes", 2)):
        d = make_preset(name, (), 256)
        a = default_pole(d)
        for w in [constant_weight(d)] + [exp_cos_weight(d, 1.0 / k) for k in (4, 8, 16)]:
            sol = solver_for(d, w).solve(a)
            zs = zero_locate(sol, d, w) if zero_count(sol, d) else []
            count_err = max(count_err, abs(zero_count(sol, d) - n), abs(len(zs) - n))
            if zs:
                located = max(located, sup(solver_for(d, w).S(zs, a)))
    criterion("8 zero counts", [("count mismatch", float(count_err), 0.0), ("|S| at zeros", located, 1e-8)])


ANNULUS_PAIRS_POLAR = [(0.6, 1.6), (0.75, 2.5), (0.8, -2.2), (0.65, -0.9), (0.85, 0.4), (0.7, 3.0),
                       (0.62, -2.8), (0.78, 1.1), (0.72, -1.6), (0.68, 0.2), (0.83, 2.0)]


def test_09_interpolation_identity(criterion):
    d = make_preset("annulus", [1.0, 0.5], 256)
    pts = [r * complex(math.cos(t), math.sin(t)) for r, t in ANNULUS_PAIRS_POLAR]
    pairs = [(pts[i], pts[(i + 3) % len(pts)]) for i in range(10)]
    f = ahlfors_map(d, 0.7)
    unit = max(interpolation_residual(d, constant_weight(d), f, z, q) for z, q in pairs)
    expcos = max(interpolation_residual(d, exp_cos_weight(d, 1.0), f, z, q) for z, q in pairs)
    dd = make_preset("disc", [1.0], 128)
    fd = ahlfors_map(dd, 0.3)
    wdisc = max(interpolation_residual(dd, abs2_weight(dd, 2.0), fd, z, q)
                for z, q in [(0.1, -0.2), (0.5j, -0.4), (0.6, 0.3 - 0.5j)])
    criterion("9 interpolation identity",
              [("annulus unit", unit, 1e-6), ("annulus exp-cos", expcos, 1e-6), ("weighted disc", wdisc, 1e-8)])


def test_10_ramadanov_suites(criterion):
    start = time.perf_counter()
    gap, worst_ratio, nonmonotone = 0.0, 0.0, 0
    for name in PRESETS:
        d = make_preset(name, (), 256)
        for study in (ramadanov_interior, ramadanov_closure):
            gap = max(gap, study(WeightFamily("constant-blend"), d, 16).max_prediction_gap())
            r = study(WeightFamily("exp-cos"), d, 16)
            worst_ratio = max(worst_ratio, r.ratio)
            nonmonotone += not r.tail_monotone()
        r = boundary_point_convergence(WeightFamily("exp-cos"), d, d.slices()[-1].start + 5, kmax=16)
        worst_ratio = max(worst_ratio, r.ratio)
        nonmonotone += not r.tail_monotone()
    elapsed = time.perf_counter() - start
    criterion("10 Ramadanov suites",
              [("homogeneity gap", gap, 1e-9), ("final/initial", worst_ratio, 0.2),
               ("non-monotone tails", float(nonmonotone), 0.0), ("seconds", elapsed, 120.0)])


def test_11_bergman(criterion):
    d = make_preset("disc", [1.0], 128)
    bk = make_bergman(d)
    xs = np.linspace(-0.5, 0.5, 5)
    grid = (xs[None, :] + 1j * xs[:, None]).ravel()
    disc = max(sup(bk.K(grid, w) - oracles.disc_bergman(grid, w)) for w in grid)

    a = make_preset("annulus", [1.0, 0.5], 256)
    pts = [0.7, 0.6, -0.7, 0.65j, -0.6 - 0.3j]
    pairs = [(z, w) for z in pts for w in pts]
    analytic = make_bergman(a, "analytic-annulus")
    span = make_bergman(a, "szego-span")
    err_a = max(abs(analytic.reduced(z, w)[0] - oracles.annulus_reduced_bergman(z, w, 0.5)) for z, w in pairs)
    err_s = max(abs(span.reduced(z, w)[0] - oracles.annulus_reduced_bergman(z, w, 0.5)) for z, w in pairs)
    g = gram_matrix(fprime_basis(a, kind="analytic-annulus"), a, "grid")
    gram_err = abs(g.entries[0, 0] - 2 * math.pi * math.log(2))
    criterion("11 Bergman and reduced kernels",
              [("disc 4 pi S^2", disc, 1e-9), ("annulus analytic", err_a, 1e-6),
               ("annulus szego-span", err_s, max(1e-3, span.gram.est_error)), ("grid Gram", gram_err, 1e-3)])


def test_12_higher_order(criterion):
    d = make_preset("disc", [1.0], 128)
    bk = make_bergman(d)
    r = np.linspace(0.0, 0.6, 4)
    zs = (r[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 6, endpoint=False))[None, :]).ravel()
    disc = max(abs(higher_reduced(2, z, 0.0, d, bk) - 2 * z / math.pi) for z in zs)
    a = make_preset("annulus", [1.0, 0.5], 256)
    ka = make_bergman(a)
    ann = abs(higher_reduced(2, 0.6, 0.7, a, ka) - oracles.annulus_higher_reduced(2, 0.6, 0.7, 0.5, 60))
    criterion("12 higher-order determinant formula", [("disc 2z/pi", disc, 1e-6), ("annulus nord=2", ann, 1e-4)])


FIXTURES = {
    "disc": (("disc", (1.0,)), constant_weight, 0.3, lambda z: oracles.disc_szego(z, 0.3)),
    "weighted disc": (("disc", (1.0,)), lambda d: abs2_weight(d, 2.0), 0.3,
                      lambda z: oracles.disc_abs2_szego(z, 0.3)),
    "annulus": (("annulus", (1.0, 0.5)), constant_weight, 0.7, lambda z: oracles.annulus_szego(z, 0.7, 0.5)),
}


def test_13_spectral_convergence(criterion):
    floor = 1e-10
    worst = 0.0  # largest error(2N)/error(N) among steps that start above the floor
    for (name, params), wf, a, oracle in FIXTURES.values():
        errs = []
        for n in (16, 32, 64, 128, 256):
            d = make_preset(name, params, n)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NearBoundaryWarning)
                s = solver_for(d, wf(d)).solve(a).values
            errs.append(sup(s - oracle(d.z)))
        for e1, e2 in zip(errs, errs[1:]):
            if e1 > floor:
                worst = max(worst, e2 / e1)
    criterion("13 spectral convergence", [("error(2N)/error(N)", worst, 1e-2)])
