"""Steering-vector and channel-synthesis correctness.

The extended-precision oracle recomputes the spherical-wavefront phase with
mpmath at 50 digits; float64 evaluation must agree entry by entry to ~1e-9
rad even though the absolute phase winds through ~1e4 cycles.
"""

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfisac.arrays import (
    ArrayGeometry,
    CarrierGrid,
    PolarPoint,
    far_field_steering,
    near_field_steering,
    rayleigh_distance,
    spherical_delays,
    synthesize_channel,
)
from nfisac.constants import SPEED_OF_LIGHT as C

FC = 3.0e11
WL = C / FC


def make_ula(n=64, spacing=WL / 2):
    return ArrayGeometry.ula(n, spacing)


def make_grid(m=0, spacing=4.6875e8):
    # m even subcarrier count halves; num_subcarriers = m + 1
    return CarrierGrid(FC, m + 1, spacing)


def test_near_field_phase_against_mpmath_oracle():
    mpmath.mp.dps = 50
    geom = make_ula(256, 0.0005)
    grid = make_grid()
    p = PolarPoint(10.0, np.pi / 3)
    vec = near_field_steering(geom, p, grid, 0)

    tau = mpmath.mpf("10.0") / mpmath.mpf(repr(C))
    cos_t = mpmath.cos(mpmath.pi / 3)
    for n in [0, 1, 127, 128, 200, 255]:
        t_n = (mpmath.mpf(n) - mpmath.mpf("127.5")) * mpmath.mpf("0.0005") / mpmath.mpf(repr(C))
        delay = mpmath.sqrt(tau**2 + t_n**2 - 2 * tau * t_n * cos_t)
        phase = -2 * mpmath.pi * mpmath.mpf(repr(FC)) * delay
        expected = complex(mpmath.cos(phase), mpmath.sin(phase))
        assert abs(vec.values[n] - expected) < 1e-8


def test_far_field_phase_formula():
    geom = make_ula(16)
    grid = make_grid()
    p = PolarPoint(1000.0, 1.1)
    vec = far_field_steering(geom, p, grid, 0)
    t = geom.element_offsets_s
    expected = np.exp(-2j * np.pi * FC * (p.range_m / C - t * np.cos(1.1)))
    np.testing.assert_allclose(vec.values, expected, rtol=0, atol=1e-12)


def test_element_offsets_are_centered_and_uniform():
    geom = make_ula(8, 0.001)
    t = geom.element_offsets_s
    assert abs(t.sum()) < 1e-18
    np.testing.assert_allclose(np.diff(t), 0.001 / C, rtol=1e-12)


def test_rayleigh_distance_value():
    geom = make_ula(256, WL / 2)
    d = (256 - 1) * WL / 2
    assert rayleigh_distance(geom, make_grid()) == pytest.approx(2 * d * d / WL, rel=1e-12)


def test_subcarrier_frequencies_centered():
    grid = CarrierGrid(FC, 65, 4.6875e8)
    freqs = grid.freqs()
    assert freqs[32] == FC
    assert freqs[0] == FC - 32 * 4.6875e8
    assert grid.bandwidth_hz() == pytest.approx(3.0e10)
    with pytest.raises(IndexError):
        grid.freq(65)


def test_source_inside_aperture_rejected():
    geom = make_ula(512, WL / 2)
    with pytest.raises(ValueError, match="aperture"):
        near_field_steering(geom, PolarPoint(0.05, np.pi / 2), make_grid(), 0)


angles = st.floats(min_value=0.2, max_value=np.pi - 0.2)
ranges = st.floats(min_value=1.0, max_value=100.0)


@given(angles, ranges)
@settings(max_examples=50, deadline=None)
def test_steering_entries_unit_modulus(theta, r):
    geom = make_ula(32)
    vec = near_field_steering(geom, PolarPoint(r, theta), make_grid(), 0)
    np.testing.assert_allclose(np.abs(vec.values), 1.0, atol=1e-12)


@given(angles, ranges)
@settings(max_examples=50, deadline=None)
def test_geometry_reversal_mirrors_angle(theta, r):
    # flipping the array end for end looks like the mirrored source angle
    geom = make_ula(32)
    grid = make_grid()
    fwd = near_field_steering(geom, PolarPoint(r, theta), grid, 0)
    rev = near_field_steering(geom, PolarPoint(r, np.pi - theta), grid, 0)
    np.testing.assert_allclose(fwd.values[::-1], rev.values, atol=1e-9)


@given(angles)
@settings(max_examples=30, deadline=None)
def test_far_field_shape_independent_of_range(theta):
    geom = make_ula(32)
    grid = make_grid()
    a1 = far_field_steering(geom, PolarPoint(10.0, theta), grid, 0).values
    a2 = far_field_steering(geom, PolarPoint(1.0e6, theta), grid, 0).values
    # range enters only through a common phase; tolerance covers float
    # rounding of the ~1e9-cycle absolute phase at the long range
    np.testing.assert_allclose(a1 * np.conj(a1[0]), a2 * np.conj(a2[0]), atol=2e-5)


def test_spherical_delay_matches_law_of_cosines():
    geom = make_ula(16, 0.002)
    p = PolarPoint(3.0, 0.9)
    taus = spherical_delays(geom, p)
    t = geom.element_offsets_s
    tau = 3.0 / C
    expected = np.sqrt(tau**2 + t**2 - 2 * tau * t * np.cos(0.9))
    np.testing.assert_allclose(taus, expected, rtol=1e-14)


def test_channel_synthesis_superposes_paths():
    geom = make_ula(16)
    grid = CarrierGrid(FC, 5, 1.0e9)
    p1 = PolarPoint(5.0, 1.0)
    p2 = PolarPoint(9.0, 2.0)
    snap1 = synthesize_channel(geom, grid, [(p1, 1.0)])
    snap2 = synthesize_channel(geom, grid, [(p2, 0.5j)])
    both = synthesize_channel(geom, grid, [(p1, 1.0), (p2, 0.5j)])
    np.testing.assert_allclose(both.matrix, snap1.matrix + snap2.matrix, atol=1e-12)
    assert snap1.matrix.shape == (5, 16)


def test_channel_requires_paths():
    with pytest.raises(ValueError, match="nonempty"):
        synthesize_channel(make_ula(8), make_grid(), [])
