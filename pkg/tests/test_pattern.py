import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paramirror.emission import AtomPosition, eta_quadrature
from paramirror.modes import MirrorSpec, theta_cutoff
from paramirror.pattern import (
    ScreenGrid,
    dark_ring_radii,
    pattern_grid,
    screen_angle,
    screen_intensity,
    screen_map,
    screen_power,
    solid_angle_per_area,
)
from paramirror.quadrature import QuadratureSpec

F = 2.0


def on_axis_at(spec, a):
    return AtomPosition.on_axis(a / spec.k - spec.f)


def test_screen_map_examples():
    spec = MirrorSpec(F, 50.0)
    assert screen_map(0.0, spec) == 0.0
    assert screen_map(math.pi / 2, spec) == pytest.approx(2 * F, rel=1e-15)
    assert screen_map(theta_cutoff(spec), spec) == pytest.approx(1 / spec.k, rel=1e-14)
    with pytest.raises(ValueError):
        screen_map(math.pi, spec)
    with pytest.raises(ValueError):
        screen_map(-0.1, spec)


@settings(max_examples=200)
@given(st.floats(0.0, 3.1))
def test_screen_angle_inverts_map(theta):
    spec = MirrorSpec(F, 10.0)
    assert float(screen_angle(screen_map(theta, spec), spec)) == pytest.approx(theta, abs=1e-13)


@settings(max_examples=200)
@given(st.floats(0.0, 50.0))
def test_jacobian_matches_numerical_derivative(rho):
    # dOmega/dA = sin(theta) (dtheta/drho) / rho
    spec = MirrorSpec(F, 10.0)
    h = 1e-6 * max(1.0, rho)
    if rho < 10 * h:
        expected = 1.0 / F ** 2  # small-angle limit: Omega ~ pi theta^2, A ~ pi rho^2, rho ~ f theta
    else:
        dth = (screen_angle(rho + h, spec) - screen_angle(rho - h, spec)) / (2 * h)
        expected = math.sin(screen_angle(rho, spec)) * dth / rho
    assert float(solid_angle_per_area(rho, spec)) == pytest.approx(expected, rel=1e-6)


def test_vertex_atom_gives_dark_screen():
    spec = MirrorSpec(F, 5.0)
    res = pattern_grid(spec, AtomPosition.on_axis(-F), ScreenGrid(20.0, 51, 16))
    assert np.all(res.intensity == 0.0)
    assert res.dark_ring_radii == []


def test_dark_ring_at_2f_for_a_pi():
    spec = MirrorSpec(F, 50.0)
    pos = on_axis_at(spec, math.pi)
    radii = dark_ring_radii(spec, pos)
    assert radii == [pytest.approx(2 * F, rel=1e-14)]
    grid = ScreenGrid(4 * F, 201, 8)
    res = pattern_grid(spec, pos, grid)
    i = int(np.argmin(np.abs(res.rho - 2 * F)))
    assert abs(res.rho[i] - 2 * F) <= grid.radius_max / (grid.n_radial - 1)
    assert res.intensity[i].max() <= 1e-10 * res.intensity.max()


@pytest.mark.parametrize("a", [0.5, math.pi, 2.5 * math.pi, 7.0, 20.0])
def test_dark_ring_count(a):
    spec = MirrorSpec(F, 1e3)
    n = sum(1 for k in range(-50, 51) if abs(k) < a / math.pi)
    assert len(dark_ring_radii(spec, on_axis_at(spec, a))) == n


@pytest.mark.parametrize("a", [2.5 * math.pi, 7.0, 20.0])
def test_dark_rings_are_nodes(a):
    spec = MirrorSpec(F, 1e3)
    pos = on_axis_at(spec, a)
    radii = np.array(dark_ring_radii(spec, pos))
    peak = pattern_grid(spec, pos, ScreenGrid(float(radii.max()) * 1.5, 2001, 4)).intensity.max()
    vals = screen_intensity(spec, pos, radii, 0.3)
    assert np.all(vals <= 1e-10 * peak)


def test_dark_rings_off_axis_empty():
    spec = MirrorSpec(F, 10.0)
    assert dark_ring_radii(spec, AtomPosition.at(0.1, 0.0, 0.0)) == []


def test_on_axis_pattern_is_symmetric():
    spec = MirrorSpec(F, 10.0)
    res = pattern_grid(spec, AtomPosition.on_axis(0.3), ScreenGrid(20.0, 101, 32))
    assert res.azimuthal_asymmetry() <= 1e-12


def test_off_axis_pattern_is_asymmetric():
    spec = MirrorSpec(F, 10.0)
    res = pattern_grid(spec, AtomPosition.at(0.3, 0.1, 0.3), ScreenGrid(20.0, 101, 32))
    assert res.azimuthal_asymmetry() > 1e-3 * res.intensity.max()
    assert np.all(res.intensity >= 0)


def test_per_solid_angle_flag():
    spec = MirrorSpec(F, 10.0)
    pos = AtomPosition.on_axis(0.3)
    grid = ScreenGrid(10.0, 41, 8)
    area = pattern_grid(spec, pos, grid)
    solid = pattern_grid(spec, pos, grid, per_solid_angle=True)
    ratio = solid_angle_per_area(area.rho, spec)[:, None]
    assert np.allclose(area.intensity, solid.intensity * ratio, rtol=1e-14, atol=0)
    with pytest.raises(ValueError):
        screen_power(solid)


def test_intensity_zero_inside_cutoff_disk():
    spec = MirrorSpec(F, 3.0)
    pos = AtomPosition.on_axis(0.2)
    assert screen_intensity(spec, pos, 0.5 / spec.k, 0.0) == 0.0
    assert screen_intensity(spec, pos, 2.0 / spec.k, 0.0) > 0.0


def test_grid_validation():
    with pytest.raises(ValueError):
        ScreenGrid(0.0)
    with pytest.raises(ValueError):
        ScreenGrid(1.0, n_radial=1)
    with pytest.raises(ValueError):
        ScreenGrid(1.0, n_azimuthal=3)
    with pytest.raises(ValueError):
        ScreenGrid(5.0, aperture_radius=4.0)


def _power_gap(spec, pos, rmax, n, n_az, window):
    res = pattern_grid(spec, pos, ScreenGrid(rmax, n, n_az))
    return abs(screen_power(res) - window)


@pytest.mark.parametrize("pos", [AtomPosition.on_axis(0.3), AtomPosition.at(0.05, 0.02, 0.3)])
def test_screen_power_converges_to_windowed_eta(pos):
    spec = MirrorSpec(F, 50.0)
    rmax = 20.0
    th_max = float(screen_angle(rmax, spec))
    window = eta_quadrature(spec, pos, QuadratureSpec(rel_tol=1e-12),
                            theta_window=(math.pi - th_max, math.pi - theta_cutoff(spec))).eta
    gaps = [_power_gap(spec, pos, rmax, n, 128, window) for n in (401, 801, 1601)]
    assert gaps[0] / gaps[1] >= 4.0 * 0.95
    assert gaps[1] / gaps[2] >= 4.0 * 0.95


def test_rows_order():
    spec = MirrorSpec(F, 10.0)
    res = pattern_grid(spec, AtomPosition.on_axis(0.3), ScreenGrid(4.0, 3, 4))
    rows = list(res.rows())
    assert len(rows) == 12
    assert rows[0][:2] == (0.0, 0.0) and rows[1][0] == 0.0 and rows[4][0] == 2.0
