"""Core value types: extended-real scores, grids, states, noise models."""

import numpy as np
import pytest

from myopic.core import (
    NEG_INFINITY,
    BoundedUniform,
    ConstantOffset,
    GoodnessValue,
    State,
    Trajectory,
    enumerate_grid,
    goodness_max,
)


class TestGoodnessValue:
    def test_max_of_finites_is_real_ordering(self):
        assert goodness_max(GoodnessValue.finite(2), GoodnessValue.finite(3)) == GoodnessValue.finite(3)

    def test_neg_infinity_below_any_finite(self):
        assert goodness_max(NEG_INFINITY, GoodnessValue.finite(-1e9)) == GoodnessValue.finite(-1e9)

    def test_neg_infinity_idempotent(self):
        assert goodness_max(NEG_INFINITY, NEG_INFINITY) == NEG_INFINITY

    def test_finite_requires_finite_value(self):
        with pytest.raises(ValueError):
            GoodnessValue.finite(float("inf"))
        with pytest.raises(ValueError):
            GoodnessValue.finite(float("nan"))

    def test_total_order_properties(self, rng):
        values = [NEG_INFINITY] + [GoodnessValue.finite(v) for v in rng.normal(size=30)]
        values += [NEG_INFINITY, GoodnessValue.finite(0.0), GoodnessValue.finite(0.0)]
        for a in values:
            for b in values:
                # totality and antisymmetry
                assert (a < b) + (b < a) + (a == b) == 1
                for c in values:
                    if a < b and b < c:
                        assert a < c
        ordered = sorted(values)
        assert ordered[0] == NEG_INFINITY
        floats = [float(v) for v in ordered]
        assert floats == sorted(floats)


class TestEnumerateGrid:
    def test_1d_three_points(self):
        grid = enumerate_grid([-1], [1], [3])
        np.testing.assert_array_equal(grid.points, [[-1], [0], [1]])

    def test_2d_corners(self):
        grid = enumerate_grid([-1, -1], [1, 1], [2, 2])
        np.testing.assert_array_equal(grid.points, [[-1, -1], [-1, 1], [1, -1], [1, 1]])

    def test_integer_spacing(self):
        grid = enumerate_grid([0], [4], [5])
        np.testing.assert_array_equal(grid.points.ravel(), [0, 1, 2, 3, 4])

    def test_enumeration_is_lexicographic_first_axis_slowest(self):
        grid = enumerate_grid([0, 0], [1, 2], [2, 3])
        np.testing.assert_array_equal(
            grid.points,
            [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]],
        )

    def test_deterministic(self):
        a = enumerate_grid([-2, 0.5], [3, 1.5], [4, 3])
        b = enumerate_grid([-2, 0.5], [3, 1.5], [4, 3])
        np.testing.assert_array_equal(a.points, b.points)

    def test_points_respect_bounds(self, rng):
        for _ in range(20):
            lo = rng.uniform(-5, 0, 3)
            hi = lo + rng.uniform(0.1, 5, 3)
            counts = rng.integers(2, 6, 3)
            grid = enumerate_grid(lo, hi, counts)
            assert len(grid) == int(np.prod(counts))
            assert np.all(grid.points >= lo - 0.0) and np.all(grid.points <= hi + 0.0)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            enumerate_grid([0], [1], [1])
        with pytest.raises(ValueError):
            enumerate_grid([0], [np.inf], [3])
        with pytest.raises(ValueError):
            enumerate_grid([0, 0], [1, 1], [3])
        with pytest.raises(ValueError):
            enumerate_grid([2], [1], [3])

    def test_symmetric_odd_grid_contains_zero(self):
        assert enumerate_grid([-1, -1], [1, 1], [5, 5]).contains_zero
        assert not enumerate_grid([-1, -1], [1, 1], [2, 2]).contains_zero


class TestStateTrajectory:
    def test_state_invariants(self):
        with pytest.raises(ValueError):
            State(-1.0, [0.0])
        with pytest.raises(ValueError):
            State(0.0, [np.nan])
        with pytest.raises(ValueError):
            State(0.0, [])

    def test_trajectory_requires_increasing_times(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.0], np.zeros((2, 2)))
        with pytest.raises(ValueError):
            Trajectory([1.0, 0.5], np.zeros((2, 2)))

    def test_trajectory_shape_check(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0], np.zeros((3, 2)))

    def test_shifted_translates_every_sample(self):
        phi = Trajectory([0.0, 1.0], [[1.0, 2.0], [3.0, 4.0]])
        shifted = phi.shifted([10.0, -1.0])
        np.testing.assert_array_equal(shifted.states, [[11.0, 1.0], [13.0, 3.0]])
        np.testing.assert_array_equal(shifted.times, phi.times)

    def test_last_state_and_duration(self):
        phi = Trajectory([0.0, 0.5, 2.0], np.arange(6.0).reshape(3, 2))
        assert phi.duration == 2.0
        assert phi.last_state.t == 2.0
        np.testing.assert_array_equal(phi.last_state.x, [4.0, 5.0])


class TestNoiseModels:
    def test_constant_offset_must_respect_bound(self):
        ConstantOffset([0.0, 1.0], bound=1.0)
        with pytest.raises(ValueError):
            ConstantOffset([0.0, 1.5], bound=1.0)

    def test_bounded_uniform_must_respect_bound(self):
        BoundedUniform([0.6, 0.8], bound=1.0)
        with pytest.raises(ValueError):
            BoundedUniform([1.0, 1.0], bound=1.0)
        with pytest.raises(ValueError):
            BoundedUniform([-0.1], bound=1.0)

    def test_samples_stay_within_declared_bound(self, rng):
        model = BoundedUniform([0.3, 0.4, 0.0], bound=0.5)
        for _ in range(200):
            w = model.sample(rng)
            assert np.linalg.norm(w) <= 0.5 + 1e-12
            assert w[2] == 0.0
