import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szg.geometry import (
    NEGATIVE,
    POSITIVE,
    PRESETS,
    BoundaryProximityError,
    GeometryError,
    boundary_distance,
    default_pole,
    fourier_tail,
    inside_near_boundary,
    make_preset,
    winding_number,
    winding_numbers,
)


def test_disc_preset():
    d = make_preset("disc", [1.0], 64)
    assert d.connectivity == 1
    assert d.total_nodes == 64
    t = d.components[0].t
    assert np.allclose(d.z, np.exp(1j * t), atol=1e-15)
    assert np.allclose(t, 2 * np.pi * np.arange(64) / 64)


def test_annulus_orientation():
    d = make_preset("annulus", [1.0, 0.5], 128)
    assert d.connectivity == 2
    outer, inner = d.components
    assert outer.orientation == POSITIVE and inner.orientation == NEGATIVE
    assert outer.signed_area() > 0 > inner.signed_area()


def test_ellipse_speed_matches_analytic_derivative():
    d = make_preset("ellipse", [1.0, 0.6], 128)
    t = d.components[0].t
    assert np.allclose(d.speed, np.sqrt(np.sin(t) ** 2 + 0.36 * np.cos(t) ** 2), atol=1e-14)


@pytest.mark.parametrize("name", PRESETS)
def test_preset_invariants(name):
    d = make_preset(name, (), 128)
    assert np.allclose(np.abs(d.tangent), 1.0, atol=1e-15)
    for i, c in enumerate(d.components):
        assert np.min(np.abs(c.dz)) > 0
        assert (c.signed_area() > 0) == (i == 0)
        assert fourier_tail(c) < 1e-10
    # analytic second derivative agrees with the spectral one
    for c in d.components:
        k = np.fft.fftfreq(c.n, 1.0 / c.n)
        ddz = np.fft.ifft(-(k**2) * np.fft.fft(c.z))
        assert np.max(np.abs(ddz - c.ddz)) < 1e-9 * np.max(np.abs(c.ddz))


def test_unit_circle_arc_length():
    for n in (16, 32, 100):
        d = make_preset("disc", [1.0], n)
        assert abs(d.arc_weights.sum() - 2 * math.pi) < 1e-12


@pytest.mark.parametrize(
    "name, params, p, expected",
    [("disc", [1.0], 0.0, 1), ("annulus", [1.0, 0.5], 0.0, 0), ("annulus", [1.0, 0.5], 0.7, 1),
     ("annulus", [1.0, 0.5], 1.3, 0)],
)
def test_winding_number_examples(name, params, p, expected):
    assert winding_number(make_preset(name, params, 64), p) == expected


def test_winding_number_rejects_boundary_nodes():
    d = make_preset("disc", [1.0], 64)
    with pytest.raises(BoundaryProximityError):
        winding_number(d, d.z[5])


def test_boundary_distance_examples():
    d = make_preset("disc", [1.0], 64)
    assert boundary_distance(d, 0.0) == pytest.approx(1.0, abs=1e-15)
    spacing = 2 * math.pi / 64
    assert abs(boundary_distance(d, 0.9) - 0.1) < spacing
    a = make_preset("annulus", [1.0, 0.5], 64)
    assert abs(boundary_distance(a, 0.7) - 0.2) < spacing


@pytest.mark.parametrize(
    "name, params, n",
    [("disc", [1.0], 15), ("disc", [1.0], 33), ("nope", [], 64), ("annulus", [1.0, 1.5], 64),
     ("circle-holes", [1.0, 0.3, 0.0, 0.3, -0.2, 0.0, 0.3], 64), ("circle-holes", [1.0, 0.8, 0.0, 0.3], 64)],
)
def test_make_preset_errors(name, params, n):
    with pytest.raises(GeometryError):
        make_preset(name, params, n)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 1.3), theta=st.floats(0.0, 2 * math.pi),
       name=st.sampled_from(["disc", "annulus", "circle-holes", "smooth-star", "ellipse"]))
def test_winding_refinement_invariance(r, theta, name):
    coarse, fine = make_preset(name, (), 64), make_preset(name, (), 128)
    p = r * complex(math.cos(theta), math.sin(theta))
    if boundary_distance(fine, p) <= 0.05:
        return
    assert winding_number(coarse, p) == winding_number(fine, p)


def test_vectorized_winding_agrees():
    d = make_preset("circle-holes", (), 64)
    xs = np.linspace(-1.1, 1.1, 23)
    pts = (xs[None, :] + 1j * xs[:, None]).ravel()
    pts = pts[[boundary_distance(d, p) > 1e-6 for p in pts]]
    assert np.array_equal(winding_numbers(d, pts), [winding_number(d, p) for p in pts])


def test_inside_near_boundary_uses_smooth_curve():
    d = make_preset("disc", [1.0], 16)
    # between two nodes the polygon chord cuts inside the circle
    t = np.pi / 16
    inside = 0.995 * np.exp(1j * t)
    outside = 1.0005 * np.exp(1j * t)
    assert winding_numbers(d, [inside])[0] == 0
    assert inside_near_boundary(d, [inside, outside]).tolist() == [True, False]


@pytest.mark.parametrize("name", PRESETS)
def test_default_pole_is_interior(name):
    d = make_preset(name, (), 64)
    a = default_pole(d)
    assert d.contains(a)
    assert abs(a.imag) < 1e-15
    assert boundary_distance(d, a) == pytest.approx(0.15 * d.scale, rel=1e-6)
