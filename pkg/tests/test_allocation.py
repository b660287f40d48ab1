"""Unit and property tests for the per-cell capacity allocator."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ranslicing.enforcement.allocation import Aggregate, allocate_capacity

from oracles import TOL, oracle_allocate


def make_aggs(demands, guarantees, maximums):
    return [
        Aggregate(
            cell_slice_id=f"cs{i}",
            scope_key="s",
            offered=demands[i],
            guaranteed_fraction=guarantees[i],
            maximum_fraction=maximums[i],
        )
        for i in range(len(demands))
    ]


def served_vector(result):
    return [a.served for a in result.aggregates]


class TestWorkedExamples:
    def test_two_slices_uncongested(self):
        # C=100, g=0.5/0.5, demands 20/90 -> 20 and 80
        result = allocate_capacity(
            make_aggs([20, 90], [0.5, 0.5], [None, None]), 100.0
        )
        assert served_vector(result) == pytest.approx([20.0, 80.0], abs=TOL)

    def test_maximum_caps_spare(self):
        # g=0.7 capped at m=0.7 leaves the rest to the uncapped slice
        result = allocate_capacity(
            make_aggs([10, 100], [0.7, 0.3], [0.7, None]), 100.0
        )
        assert served_vector(result) == pytest.approx([10.0, 90.0], abs=TOL)

    def test_congestion_split_70_30(self):
        result = allocate_capacity(
            make_aggs([500, 500], [0.7, 0.3], [None, None]), 200.0
        )
        assert served_vector(result) == pytest.approx([140.0, 60.0], abs=TOL)

    def test_oversubscribed_floors_scale_proportionally(self):
        # Degraded cell: floors 140/60 against C=100 scale to 70/30
        result = allocate_capacity(
            make_aggs([500, 500], [0.7, 0.3], [None, None]), 100.0
        )
        assert served_vector(result) == pytest.approx([70.0, 30.0], abs=TOL)

    def test_empty_input(self):
        result = allocate_capacity([], 100.0)
        assert result.total_served == 0.0
        assert result.aggregates == ()

    def test_zero_capacity(self):
        result = allocate_capacity(make_aggs([50], [0.5], [None]), 0.0)
        assert served_vector(result) == [0.0]
        assert result.aggregates[0].blocked == pytest.approx(50.0)

    def test_negative_capacity_rejected(self):
        with pytest.raises(ValueError):
            allocate_capacity([], -1.0)

    def test_negative_demand_rejected(self):
        with pytest.raises(ValueError):
            allocate_capacity(make_aggs([-5], [0.0], [None]), 10.0)

    def test_blocked_is_offered_minus_served(self):
        result = allocate_capacity(make_aggs([300, 100], [0.5, 0.5], [None, None]), 200.0)
        for agg in result.aggregates:
            assert agg.blocked == pytest.approx(agg.offered - agg.served, abs=TOL)

    def test_guaranteed_target_is_demand_capped(self):
        result = allocate_capacity(make_aggs([10, 400], [0.5, 0.5], [None, None]), 200.0)
        assert result.aggregates[0].guaranteed_target == pytest.approx(10.0)
        assert result.aggregates[1].guaranteed_target == pytest.approx(100.0)


class TestOracleAgreement:
    def test_matches_closed_form_on_random_instances(self):
        rng = random.Random(1234)
        for _ in range(2000):
            n = rng.randint(1, 4)
            capacity = rng.uniform(0.0, 500.0)
            demands = [rng.uniform(0, 600) for _ in range(n)]
            guarantees = [rng.uniform(0, 1) for _ in range(n)]
            total_g = sum(guarantees)
            if total_g > 1 and rng.random() < 0.7:
                guarantees = [g / total_g for g in guarantees]
            maximums = [
                None if rng.random() < 0.5 else rng.uniform(g, 1.5)
                for g in guarantees
            ]
            expected = oracle_allocate(demands, guarantees, maximums, capacity)
            result = allocate_capacity(make_aggs(demands, guarantees, maximums), capacity)
            for got, want in zip(served_vector(result), expected):
                assert math.isclose(got, want, rel_tol=0, abs_tol=1e-6 * max(1, capacity))


@st.composite
def allocation_instances(draw):
    n = draw(st.integers(1, 5))
    capacity = draw(st.floats(0, 1000, allow_nan=False, allow_infinity=False))
    demands = draw(st.lists(st.floats(0, 1500, allow_nan=False), min_size=n, max_size=n))
    guarantees = draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n))
    maximums = draw(
        st.lists(
            st.one_of(st.none(), st.floats(0, 2, allow_nan=False)),
            min_size=n, max_size=n,
        )
    )
    # maximum below guaranteed is rejected upstream by AL validation
    maximums = [
        None if m is None else max(m, guarantees[i]) for i, m in enumerate(maximums)
    ]
    return demands, guarantees, maximums, capacity


class TestProperties:
    @settings(max_examples=300, deadline=None)
    @given(allocation_instances())
    def test_cap_respect_and_nonnegative(self, instance):
        demands, guarantees, maximums, capacity = instance
        result = allocate_capacity(make_aggs(demands, guarantees, maximums), capacity)
        slack = 1e-9 * max(1.0, capacity)
        for i, agg in enumerate(result.aggregates):
            assert agg.served >= -slack
            assert agg.served <= demands[i] + slack
            if maximums[i] is not None:
                assert agg.served <= maximums[i] * capacity + slack

    @settings(max_examples=300, deadline=None)
    @given(allocation_instances())
    def test_work_conservation(self, instance):
        demands, guarantees, maximums, capacity = instance
        result = allocate_capacity(make_aggs(demands, guarantees, maximums), capacity)
        caps = [
            d if m is None else min(d, m * capacity)
            for d, m in zip(demands, maximums)
        ]
        expected_total = min(capacity, sum(caps))
        assert math.isclose(
            result.total_served, expected_total,
            rel_tol=0, abs_tol=1e-6 * max(1.0, capacity),
        )

    @settings(max_examples=300, deadline=None)
    @given(allocation_instances())
    def test_floor_respect_when_feasible(self, instance):
        demands, guarantees, maximums, capacity = instance
        floors = [
            min(d if m is None else min(d, m * capacity), g * capacity)
            for d, g, m in zip(demands, guarantees, maximums)
        ]
        if sum(floors) > capacity:
            return  # oversubscribed: floors are scaled, not honored
        result = allocate_capacity(make_aggs(demands, guarantees, maximums), capacity)
        slack = 1e-6 * max(1.0, capacity)
        for floor, agg in zip(floors, result.aggregates):
            assert agg.served >= floor - slack

    @settings(max_examples=200, deadline=None)
    @given(allocation_instances(), st.floats(0.1, 200, allow_nan=False))
    def test_demand_monotonicity(self, instance, bump):
        demands, guarantees, maximums, capacity = instance
        base = allocate_capacity(make_aggs(demands, guarantees, maximums), capacity)
        bumped_demands = list(demands)
        bumped_demands[0] += bump
        bumped = allocate_capacity(
            make_aggs(bumped_demands, guarantees, maximums), capacity
        )
        slack = 1e-6 * max(1.0, capacity)
        assert bumped.aggregates[0].served >= base.aggregates[0].served - slack
