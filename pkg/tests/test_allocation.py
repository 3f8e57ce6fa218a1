"""Water-filling, subcarrier partitioning, and plan validation."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfisac.allocation import (
    AllocationPlan,
    SensingRequirement,
    UserDemand,
    partition_and_allocate,
    plan_sum_rate,
    sensing_subcarriers,
    water_fill,
)
from nfisac.delay_phase import Arc
from nfisac.errors import InfeasibleAllocationError

ARC = Arc(1.0471975511965976, 1.3962634015954636, 20.0)

# two users on six subcarriers; small enough to brute-force every assignment
TOY_GAINS = np.array(
    [
        [0.8, 1.1, 0.3, 1.2, 0.2, 0.5],
        [0.6, 0.9, 1.2, 0.7, 1.1, 0.8],
    ]
)


def exact_water_fill(gains, budget, noise):
    """Closed-form water level by sorting the active-set breakpoints."""
    g = np.asarray(gains, dtype=float)
    floors = np.where(g > 0, noise / np.where(g > 0, g, 1.0), np.inf)
    finite = np.sort(floors[np.isfinite(floors)])
    if finite.size == 0 or budget <= 0:
        return np.zeros_like(g)
    for k in range(finite.size, 0, -1):
        mu = (budget + finite[:k].sum()) / k
        if mu >= finite[k - 1] and (k == finite.size or mu <= finite[k]):
            return np.maximum(0.0, mu - floors)
    raise AssertionError("no consistent active set")


# zero gains are legal (dead channel); positive ones keep noise/g modest so
# the bisection bracket, and with it the guaranteed precision, stays tight
gain_arrays = st.lists(
    st.one_of(st.just(0.0), st.floats(min_value=1e-3, max_value=5.0)),
    min_size=1,
    max_size=8,
).map(np.array)


@given(gain_arrays, st.floats(min_value=0.1, max_value=50.0))
@settings(max_examples=200, deadline=None)
def test_water_fill_matches_closed_form(gains, budget):
    noise = 1.0
    got = water_fill(gains, budget, noise)
    want = exact_water_fill(gains, budget, noise)
    np.testing.assert_allclose(got, want, atol=1e-6)
    assert got.sum() <= budget + 1e-6
    assert np.all(got >= 0)


@given(st.integers(min_value=0, max_value=1_000_000))
@settings(max_examples=60, deadline=None)
def test_water_fill_is_a_stationary_point(seed):
    # moving epsilon of power between any two channels cannot raise the rate
    rng = np.random.default_rng(seed)
    g = rng.uniform(0.05, 3.0, 6)
    budget, noise = 10.0, 1.0
    p = water_fill(g, budget, noise)

    def rate(powers):
        return np.log2(1.0 + powers * g / noise).sum()

    base = rate(p)
    eps = 1e-6 * budget
    for i in range(6):
        if p[i] < eps:
            continue
        for j in range(6):
            if i == j:
                continue
            q = p.copy()
            q[i] -= eps
            q[j] += eps
            assert rate(q) <= base + 1e-9


def test_water_fill_input_validation():
    with pytest.raises(ValueError, match="noise_power_w"):
        water_fill(np.array([1.0]), 1.0, 0.0)
    assert np.all(water_fill(np.array([]), 1.0, 1.0) == 0)
    assert np.all(water_fill(np.array([0.0, 0.0]), 1.0, 1.0) == 0)
    assert np.all(water_fill(np.array([1.0, 2.0]), 0.0, 1.0) == 0)


def test_sensing_indices_cover_uniformly():
    np.testing.assert_array_equal(sensing_subcarriers(65, 1), [32])
    np.testing.assert_array_equal(sensing_subcarriers(65, 2), [0, 64])
    np.testing.assert_array_equal(sensing_subcarriers(65, 5), [0, 16, 32, 48, 64])
    np.testing.assert_array_equal(sensing_subcarriers(6, 6), [0, 1, 2, 3, 4, 5])
    with pytest.raises(ValueError, match="more subcarriers"):
        sensing_subcarriers(8, 9)


def test_partition_matches_exhaustive_assignment_search():
    # fix the sensing set the partitioner would pick, then try every
    # user-per-subcarrier assignment with optimal (closed form) water-filled
    # power; the shipped greedy-plus-bisection rate must match the best
    users = [UserDemand(0, TOY_GAINS[0]), UserDemand(1, TOY_GAINS[1])]
    sreq = SensingRequirement(ARC, 2, 1.0)
    total, noise = 12.0, 1.0
    plan, rate = partition_and_allocate(users, sreq, total, noise)

    sensing = set(sensing_subcarriers(6, 2).tolist())
    comm = [m for m in range(6) if m not in sensing]
    budget = total - 2 * 1.0
    best = 0.0
    for code in range(2 ** len(comm)):
        owners = [(code >> k) & 1 for k in range(len(comm))]
        g = np.array([TOY_GAINS[u][m] for u, m in zip(owners, comm)])
        p = exact_water_fill(g, budget, noise)
        best = max(best, np.log2(1.0 + p * g / noise).sum())
    assert rate == pytest.approx(best, rel=1e-9)
    assert rate == pytest.approx(plan_sum_rate(plan, users, noise), rel=1e-12)


def test_partition_reserves_floor_power_on_sensing_set():
    users = [UserDemand(0, TOY_GAINS[0]), UserDemand(1, TOY_GAINS[1])]
    sreq = SensingRequirement(ARC, 2, 1.5)
    plan, _ = partition_and_allocate(users, sreq, 12.0, 1.0)
    assert plan.sensing_set == (0, 5)
    for m in plan.sensing_set:
        assert plan.powers_w[m] == pytest.approx(1.5)
    assert plan.powers_w.sum() == pytest.approx(12.0)
    assert set(plan.comm_assignment) == {1, 2, 3, 4}


def test_equal_gains_go_to_lowest_user_id():
    g = np.array([1.0, 2.0])
    users = [UserDemand(4, g), UserDemand(2, g)]
    plan, _ = partition_and_allocate(users, None, 4.0, 1.0)
    assert set(plan.comm_assignment.values()) == {2}


def test_infeasible_when_budget_not_above_sensing_floor():
    users = [UserDemand(0, TOY_GAINS[0])]
    sreq = SensingRequirement(ARC, 2, 1.0)
    with pytest.raises(InfeasibleAllocationError, match="sensing"):
        partition_and_allocate(users, sreq, 2.0, 1.0)


def test_sum_rate_never_increases_with_sensing_count():
    users = [UserDemand(0, TOY_GAINS[0]), UserDemand(1, TOY_GAINS[1])]
    rates = []
    for k_s in [0, 1, 2, 3]:
        sreq = SensingRequirement(ARC, k_s, 1.0) if k_s else None
        _, rate = partition_and_allocate(users, sreq, 12.0, 1.0)
        rates.append(rate)
    assert all(b <= a + 1e-12 for a, b in zip(rates, rates[1:]))


def test_sum_rate_nondecreasing_in_total_power():
    users = [UserDemand(0, TOY_GAINS[0]), UserDemand(1, TOY_GAINS[1])]
    sreq = SensingRequirement(ARC, 2, 1.0)
    rates = [partition_and_allocate(users, sreq, p, 1.0)[1] for p in [3.0, 6.0, 12.0, 24.0]]
    assert all(a <= b + 1e-12 for a, b in zip(rates, rates[1:]))


def test_plan_validation():
    with pytest.raises(ValueError, match="disjoint"):
        AllocationPlan((0,), {0: 1}, np.ones(3), 3.0, 0.5)
    with pytest.raises(ValueError, match="out of range"):
        AllocationPlan((5,), {}, np.ones(3), 3.0, 0.5)
    with pytest.raises(ValueError, match="budget"):
        AllocationPlan((), {}, np.ones(3), 2.0, 0.0)
    with pytest.raises(ValueError, match="floor"):
        AllocationPlan((0,), {}, np.array([0.1, 0.0, 0.0]), 3.0, 0.5)
    with pytest.raises(ValueError, match=">= 0"):
        AllocationPlan((), {}, np.array([-0.1, 0.0]), 3.0, 0.0)


def test_user_demand_validation():
    with pytest.raises(ValueError, match="1-D"):
        UserDemand(0, np.ones((2, 2)))
    with pytest.raises(ValueError, match="finite"):
        UserDemand(0, np.array([1.0, np.nan]))
    with pytest.raises(ValueError, match="finite"):
        UserDemand(0, np.array([1.0, -0.5]))


def test_partition_input_validation():
    users = [UserDemand(0, np.ones(4)), UserDemand(0, np.ones(4))]
    with pytest.raises(ValueError, match="unique"):
        partition_and_allocate(users, None, 4.0, 1.0)
    mixed = [UserDemand(0, np.ones(4)), UserDemand(1, np.ones(5))]
    with pytest.raises(ValueError, match="same subcarriers"):
        partition_and_allocate(mixed, None, 4.0, 1.0)
    with pytest.raises(ValueError, match="num_subcarriers"):
        partition_and_allocate([], None, 4.0, 1.0)
