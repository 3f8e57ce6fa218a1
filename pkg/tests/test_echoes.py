"""Echo synthesis and the three-point refined angle estimator."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfisac.arrays import ArrayGeometry, CarrierGrid, PolarPoint
from nfisac.constants import SPEED_OF_LIGHT as C
from nfisac.delay_phase import Arc, arc_trajectory_spec, fit_trajectory
from nfisac.echoes import parabolic_refine, sense_from_echoes, simulate_echoes

FC = 3.0e11
WL = C / FC


def test_parabolic_refine_recovers_sampled_quadratic_peak():
    # samples of c - (x - x0)^2 on the integer lattice refine to x0 exactly
    for x0 in [3.3, 4.0, 2.5, 3.86]:
        x = np.arange(7, dtype=float)
        vals = 5.0 - (x - x0) ** 2
        k = int(np.argmax(vals))
        off = parabolic_refine(vals, k)
        assert k + off == pytest.approx(x0, abs=1e-12)


def test_parabolic_refine_edge_and_flat_cases():
    vals = np.array([3.0, 2.0, 1.0])
    assert parabolic_refine(vals, 0) == 0.0
    assert parabolic_refine(vals, 2) == 0.0
    flat = np.ones(5)
    assert parabolic_refine(flat, 2) == 0.0


@given(st.floats(min_value=-3.0, max_value=3.0))
@settings(max_examples=50, deadline=None)
def test_parabolic_refine_offset_is_clipped(x0):
    x = np.arange(9, dtype=float)
    vals = 10.0 - np.abs(x - 4.0 - x0) ** 1.2
    off = parabolic_refine(vals, 4)
    assert -0.5 <= off <= 0.5


def test_all_zero_echoes_mean_no_detection():
    angles = np.linspace(1.0, 1.3, 8)
    assert sense_from_echoes(angles, np.zeros(8, dtype=complex), np.ones(8)) is None


def test_estimator_input_validation():
    with pytest.raises(ValueError, match="at least 3"):
        sense_from_echoes(np.array([1.0, 1.1]), np.ones(2, dtype=complex), np.ones(2))
    with pytest.raises(ValueError, match="align"):
        sense_from_echoes(np.linspace(1.0, 1.2, 4), np.ones(3, dtype=complex), np.ones(4))


def test_estimate_invariant_to_common_echo_scaling():
    angles = np.linspace(1.0, 1.3, 16)
    rng = np.random.default_rng(4)
    echoes = rng.normal(size=16) + 1j * rng.normal(size=16)
    est0 = sense_from_echoes(angles, echoes, np.ones(16))
    est1 = sense_from_echoes(angles, echoes * (2.0 - 1.5j), np.ones(16))
    assert est0 == pytest.approx(est1, abs=1e-12)


def test_noiseless_sweep_recovers_target_angle():
    # a delay-phase sweep across an arc, probed on 16 sensing subcarriers,
    # places the echo peak at the subcarrier pointing at the target
    geom = ArrayGeometry.ula(128, WL / 2)
    grid = CarrierGrid(FC, 65, 4.6875e8)
    arc = Arc(np.pi / 3, np.pi * 4 / 9, 20.0)
    cfg, _ = fit_trajectory(geom, grid, arc_trajectory_spec(grid, arc))
    sensing_m = np.round(np.linspace(0, 64, 16)).astype(int)
    arc_angles = np.array([arc.angle_at(m / 64.0) for m in sensing_m])
    target = PolarPoint(20.0, arc.angle_at(0.55))
    powers = np.full(16, 2.0)
    echoes = simulate_echoes(
        geom, grid, cfg, sensing_m, target, 0.8 + 0.3j, powers,
        0.0, np.random.default_rng(0),
    )
    est = sense_from_echoes(arc_angles, echoes, powers)
    step = arc_angles[1] - arc_angles[0]
    assert abs(est - target.angle_rad) < step


def test_echo_power_shape_validation():
    geom = ArrayGeometry.ula(16, WL / 2)
    grid = CarrierGrid(FC, 5, 1e8)
    arc = Arc(1.0, 1.2, 10.0)
    cfg, _ = fit_trajectory(geom, grid, arc_trajectory_spec(grid, arc))
    with pytest.raises(ValueError, match="per sensing subcarrier"):
        simulate_echoes(
            geom, grid, cfg, [0, 2, 4], PolarPoint(10.0, 1.1), 1.0,
            np.ones(2), 0.0, np.random.default_rng(0),
        )


def test_echoes_are_deterministic_given_rng_state():
    geom = ArrayGeometry.ula(16, WL / 2)
    grid = CarrierGrid(FC, 5, 1e8)
    arc = Arc(1.0, 1.2, 10.0)
    cfg, _ = fit_trajectory(geom, grid, arc_trajectory_spec(grid, arc))
    args = (geom, grid, cfg, [0, 2, 4], PolarPoint(10.0, 1.1), 1.0, np.ones(3))
    e0 = simulate_echoes(*args, 0.05, np.random.default_rng(33))
    e1 = simulate_echoes(*args, 0.05, np.random.default_rng(33))
    assert np.array_equal(e0, e1)
