import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_iso.errors import AlphaOutOfRange, DimTooSmall, SingularEvaluation, WeightInvalid
from steklov_iso.weights import (
    LogConvexWeight,
    PowerWeightPair,
    eval_interior_weight,
    make_power_pair,
    validate_log_convex,
    weight_from_spec,
)


class TestPowerPair:
    def test_classical_pair_is_unweighted(self):
        wp = make_power_pair(0, 0, 2)
        x = np.array([[0.3, -0.2], [2.0, 1.0]])
        assert np.allclose(wp.w(x), 1.0)
        assert np.allclose(wp.v(x), 1.0)

    def test_alpha_at_minus_n_rejected(self):
        with pytest.raises(AlphaOutOfRange):
            make_power_pair(-2, 5, 2)

    def test_dimension_one_rejected(self):
        with pytest.raises(DimTooSmall):
            make_power_pair(0, 0, 1)

    def test_boundary_weight_exponent(self):
        wp = make_power_pair(1, -0.5, 3)
        assert wp.v.exponent == pytest.approx(-1.5)
        x = np.array([2.0, 0.0, 0.0])
        assert wp.v(x) == pytest.approx(2.0**-1.5)

    @given(st.floats(-1.99, 6), st.floats(-6, 6))
    def test_accepted_pairs_satisfy_alpha_bound(self, a, b):
        assert make_power_pair(a, b, 2).alpha > -2

    def test_spec_roundtrip(self):
        wp = make_power_pair(1, 2, 2)
        assert weight_from_spec(wp.to_spec()) == wp


class TestEvaluation:
    def test_power_weight_square(self):
        assert eval_interior_weight(make_power_pair(2, 0, 2), [3.0, 4.0]) == pytest.approx(25.0)

    def test_constant_potential(self):
        W = LogConvexWeight.create("constant", c=0.0)
        assert eval_interior_weight(W, [7.0, -1.0]) == 1.0

    def test_half_quadratic(self):
        W = LogConvexWeight.create("quadratic", a=0.5)
        assert eval_interior_weight(W, [0.6, 0.8]) == pytest.approx(math.exp(0.5), rel=1e-14)

    def test_negative_exponent_at_origin(self):
        with pytest.raises(SingularEvaluation):
            eval_interior_weight(make_power_pair(-1, 0, 2), [0.0, 0.0])

    def test_positive_exponent_at_origin(self):
        assert eval_interior_weight(make_power_pair(1, 0, 2), [0.0, 0.0]) == 0.0


class TestValidation:
    def test_quadratic_ok(self):
        assert validate_log_convex(LogConvexWeight.create("quadratic", a=1.0)).ok

    def test_decreasing_rejected(self):
        W = LogConvexWeight.create("power", a=-1.0, p=1.0)
        cert = validate_log_convex(W)
        assert not cert.ok
        assert cert.reason == "decreasing"

    def test_concave_rejected(self):
        r = np.linspace(0.0, 10.0, 200)
        W = LogConvexWeight.create("tabulated", r=r, V=np.log1p(r))
        cert = validate_log_convex(W)
        assert not cert.ok
        assert cert.reason == "concave"

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            validate_log_convex(LogConvexWeight.create("constant"), grid_size=8)

    def test_power_below_one_rejected(self):
        with pytest.raises(WeightInvalid):
            LogConvexWeight.create("power", a=1.0, p=0.5)

    def test_unknown_kind(self):
        with pytest.raises(WeightInvalid):
            weight_from_spec({"kind": "gaussian"})

    @settings(max_examples=50, deadline=None)
    @given(
        st.sampled_from(["quadratic", "power"]),
        st.floats(0.0, 2.0),
        st.floats(1.0, 3.0),
        st.integers(0, 255),
        st.integers(0, 255),
    )
    def test_monotone_and_midpoint_convex(self, family, a, p, i, j):
        W = LogConvexWeight.create(family, r_max=3.0, a=a, p=p) if family == "power" else LogConvexWeight.create(family, r_max=3.0, a=a)
        assert validate_log_convex(W).ok
        grid = np.linspace(0.0, W.r_max, 256)
        r1, r2 = sorted((grid[i], grid[j]))
        w1, w2 = W.of_radius(r1), W.of_radius(r2)
        wm = W.of_radius(0.5 * (r1 + r2))
        assert w1 <= w2 * (1 + 1e-10)
        assert wm**2 <= w1 * w2 * (1 + 1e-10)


def test_pair_is_hashable():
    assert hash(PowerWeightPair(0.0, 1.0, 2)) == hash(make_power_pair(0, 1, 2))
