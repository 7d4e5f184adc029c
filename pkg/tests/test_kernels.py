import math
import warnings

import numpy as np
import pytest

from szg import oracles
from szg.boundary import BoundaryField, NearBoundaryWarning, abs2_weight, constant_weight, exp_cos_weight
from szg.geometry import PRESETS, default_pole, make_preset
from szg.kernels import (
    BoundaryZeroError,
    ahlfors_eval,
    ahlfors_map,
    boundary_identity_residual,
    garabedian,
    garabedian_from_szego,
    garabedian_interior,
    hermitian_symmetry_residual,
    interpolation_residual,
    l_regular_interior,
    reflection_identity_residual,
    reproducing_residual,
    szego_interior,
    unit_weight,
    zero_count,
    zero_locate,
)
from szg.kerzman_stein import SzegoSolution, solver_for

DISC = make_preset("disc", [1.0], 128)
ANNULUS = make_preset("annulus", [1.0, 0.5], 256)
ELLIPSE = make_preset("ellipse", [1.0, 0.6], 256)


def weighted_disc_L(z, a):
    # phi = |z - 2|^2 = p conj(p) with p = z - 2 gives L_phi(z, a) = p(z) / (p(a) 2 pi (z - a))
    return (z - 2) / ((a - 2) * 2 * math.pi * (z - a))


def test_szego_interior_examples():
    w = unit_weight(DISC)
    sol = solver_for(DISC, w).solve(0.3)
    assert szego_interior(sol, 0.5, DISC, w) == pytest.approx(1 / (2 * math.pi * 0.85), abs=1e-12)
    assert szego_interior(sol, 0.5, DISC, w) == pytest.approx(0.1872411, abs=1e-7)
    wp = abs2_weight(DISC, 2.0)
    sol = solver_for(DISC, wp).solve(0.0)
    assert szego_interior(sol, 0.0, DISC, wp) == pytest.approx(1 / (8 * math.pi), abs=1e-10)
    wa = unit_weight(ANNULUS)
    sol = solver_for(ANNULUS, wa).solve(0.7)
    n = np.arange(-400, 401)
    expected = np.sum(0.49**n / (1 + 0.5 ** (2 * n + 1))) / (2 * math.pi)
    assert szego_interior(sol, 0.7, ANNULUS, wa) == pytest.approx(expected, abs=1e-8)


def test_szego_interior_rejects_foreign_solution():
    sol = solver_for(DISC, unit_weight(DISC)).solve(0.3)
    with pytest.raises(ValueError):
        szego_interior(sol, 0.1, DISC, abs2_weight(DISC))


@pytest.mark.parametrize(
    "d, wf, z1, z2, tol",
    [(DISC, unit_weight, 0.3, -0.4j, 1e-10), (ANNULUS, unit_weight, 0.7, -0.6, 1e-8),
     (ELLIPSE, lambda d: exp_cos_weight(d, 1.0), 0.2, 0.1 + 0.3j, 1e-7)],
)
def test_hermitian_symmetry(d, wf, z1, z2, tol):
    assert hermitian_symmetry_residual(d, wf(d), z1, z2) < tol


def test_hermitian_symmetry_annulus_against_oracle():
    w = unit_weight(ANNULUS)
    s = solver_for(ANNULUS, w).S(0.7, -0.6)[0]
    assert abs(s - oracles.annulus_szego(0.7, -0.6, 0.5)) < 1e-8


def test_garabedian_disc():
    w = unit_weight(DISC)
    g = garabedian(DISC, w, 0.0)
    assert g.boundary_L.values[0] == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    assert np.max(np.abs(g.boundary_L.values - 1 / (2 * math.pi * DISC.z))) < 1e-10
    for a in (0.0, 0.3, -0.2 + 0.5j):
        g = garabedian(DISC, w, a)
        assert np.max(np.abs(g.boundary_l.values)) < 1e-10
        pole = 1 / (2 * math.pi * (DISC.z - a))
        assert np.max(np.abs(g.boundary_L.values - g.boundary_l.values - pole)) < 1e-15


def test_garabedian_weighted_disc_oracle():
    w = abs2_weight(DISC, 2.0)
    g = garabedian(DISC, w, 0.0)
    assert np.max(np.abs(g.boundary_L.values - weighted_disc_L(DISC.z, 0.0))) < 1e-8


@pytest.mark.parametrize("name", ["disc", "annulus", "circle-holes"])
def test_boundary_identity(name):
    d = make_preset(name, (), 256)
    w = exp_cos_weight(d, 1.0)
    sol = solver_for(d, w).solve(default_pole(d))
    assert boundary_identity_residual(sol, garabedian_from_szego(sol, d, w), d, w) < 1e-8


def test_l_regular_disc_vanishes():
    w = unit_weight(DISC)
    assert np.max(np.abs(l_regular_interior(0.3, [0.1, -0.4j, 0.5], DISC, w))) < 1e-10


def test_l_regular_cross_path_annulus():
    w = unit_weight(ANNULUS)
    a, zp = 0.7, -0.7
    via_boundary = garabedian_interior(garabedian(ANNULUS, w, a), zp, ANNULUS)[0] - 1 / (2 * math.pi * (zp - a))
    assert abs(l_regular_interior(a, zp, ANNULUS, w)[0] - via_boundary) < 1e-7


def test_l_regular_weighted_disc_oracle():
    w = abs2_weight(DISC, 2.0)
    a, zp = 0.3, 0.1
    expected = weighted_disc_L(zp, a) - 1 / (2 * math.pi * (zp - a))
    assert abs(l_regular_interior(a, zp, DISC, w)[0] - expected) < 1e-7


@pytest.mark.parametrize(
    "d, wf, a, zp, tol",
    [(DISC, unit_weight, 0.3, -0.5, 1e-10), (ANNULUS, unit_weight, 0.7, -0.6, 1e-8),
     (ELLIPSE, lambda d: exp_cos_weight(d, 1.0), 0.3, -0.2 + 0.1j, 1e-7)],
)
def test_reflection(d, wf, a, zp, tol):
    assert reflection_identity_residual(a, zp, d, wf(d)) < tol


def test_reproducing_examples():
    w = unit_weight(DISC)
    sol = solver_for(DISC, w).solve(0.5)
    assert reproducing_residual(sol, DISC.sample(lambda z: z**3), 0.125, DISC, w) < 1e-10
    wp = abs2_weight(DISC, 2.0)
    sol = solver_for(DISC, wp).solve(0.2)
    assert reproducing_residual(sol, DISC.sample(lambda z: 1 / (z - 3)), 1 / (0.2 - 3), DISC, wp) < 1e-8
    wa = unit_weight(ANNULUS)
    sol = solver_for(ANNULUS, wa).solve(0.7)
    assert reproducing_residual(sol, ANNULUS.sample(lambda z: 1 / z), 1 / 0.7, ANNULUS, wa) < 1e-8


def battery(d):
    c = complex(np.mean(d.components[0].z))
    funcs = [lambda z: np.ones_like(z), lambda z: z**3 - 2 * z, lambda z: 1 / (z - 3 * d.scale - c),
             lambda z: (z - c) ** 5, lambda z: 1 / (z - 2.5j * d.scale - c) ** 2, lambda z: np.exp(z)]
    for h in d.hole_points:
        funcs[-1 - d.hole_points.index(h)] = lambda z, h=h: 1 / (z - h)
    return funcs


@pytest.mark.parametrize("name", PRESETS)
def test_reproducing_battery(name):
    d = make_preset(name, (), 256)
    w = exp_cos_weight(d, 1.0)
    a = default_pole(d)
    sol = solver_for(d, w).solve(a)
    for f in battery(d):
        assert reproducing_residual(sol, d.sample(f), complex(f(np.array([a]))[0]), d, w) < 1e-8


@pytest.mark.parametrize("name, n", [("disc", 0), ("annulus", 1), ("circle-holes", 2)])
def test_zero_counts(name, n):
    d = make_preset(name, (), 256)
    for w in (unit_weight(d), exp_cos_weight(d, 0.25)):
        sol = solver_for(d, w).solve(default_pole(d))
        assert zero_count(sol, d) == n
        zs = zero_locate(sol, d, w)
        assert len(zs) == n
        if zs:
            assert np.max(np.abs(solver_for(d, w).S(zs, default_pole(d)))) < 1e-8


def test_annulus_zero_location_against_oracle():
    w = unit_weight(ANNULUS)
    sol = solver_for(ANNULUS, w).solve(0.7)
    assert zero_count(sol, ANNULUS) == 1
    (z,) = zero_locate(sol, ANNULUS, w)
    assert abs(z.imag) < 1e-12 and z.real < 0
    assert abs(oracles.annulus_szego(z, 0.7, 0.5)) < 1e-8
    assert z == pytest.approx(-0.5 / 0.7, abs=1e-10)


def test_disc_has_no_zeros():
    w = unit_weight(DISC)
    assert zero_locate(solver_for(DISC, w).solve(0.6), DISC, w) == []


def test_zero_count_rejects_boundary_zero():
    vals = np.ones(DISC.total_nodes, dtype=complex)
    vals[7] = 0.0
    fake = SzegoSolution(0.0, BoundaryField(vals, DISC.domain_id), "x", DISC.domain_id, 0.0, 0.0)
    with pytest.raises(BoundaryZeroError):
        zero_count(fake, DISC)


def test_ahlfors_disc():
    f = ahlfors_map(DISC, 0.3)
    assert abs(ahlfors_eval(f, 0.3)[0]) < 1e-12
    rng = np.random.default_rng(7)
    r = 0.8 * np.sqrt(rng.uniform(size=20))
    pts = r * np.exp(2j * np.pi * rng.uniform(size=20))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        vals = ahlfors_eval(f, pts)
    assert np.max(np.abs(vals - oracles.disc_ahlfors(pts, 0.3))) < 1e-9


def test_ahlfors_annulus_is_proper():
    f = ahlfors_map(ANNULUS, 0.7)
    assert np.max(np.abs(np.abs(f.boundary_values()) - 1)) < 1e-8
    assert abs(ahlfors_eval(f, 0.7)[0]) < 1e-8
    assert len(f.zeros) == 2


def test_interpolation_weighted_disc():
    w = abs2_weight(DISC, 2.0)
    f = ahlfors_map(DISC, 0.3)
    assert f.zeros == [0.3]
    assert interpolation_residual(DISC, w, f, 0.1, -0.2) < 1e-8


@pytest.mark.parametrize("wf", [unit_weight, lambda d: exp_cos_weight(d, 1.0)])
def test_interpolation_annulus(wf):
    f = ahlfors_map(ANNULUS, 0.7)
    assert interpolation_residual(ANNULUS, wf(ANNULUS), f, 0.6j, -0.55) < 1e-6
