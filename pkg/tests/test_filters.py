import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drivestyle.errors import DataError, InvalidParameters, NonUniformSampling, TooShort
from drivestyle.filters import (
    EkfConfig,
    SgConfig,
    Trajectory,
    derivative_series,
    ekf_smooth,
    sg_smooth,
)


def line(n=50, dt=0.1, speed=10.0, heading=0.3):
    t = np.arange(n) * dt
    return Trajectory(t, speed * t * np.cos(heading), speed * t * np.sin(heading), "line")


def circle(n=200, dt=0.1, speed=10.0, radius=50.0):
    t = np.arange(n) * dt
    ang = speed / radius * t
    return Trajectory(t, radius * np.sin(ang), radius * (1 - np.cos(ang)), "circle")


class TestTrajectory:
    def test_rejects_non_increasing_time(self):
        with pytest.raises(DataError):
            Trajectory([0, 0.1, 0.1], [0, 1, 2], [0, 0, 0])

    def test_rejects_nan(self):
        with pytest.raises(DataError):
            Trajectory([0, 0.1, 0.2], [0, np.nan, 2], [0, 0, 0])

    def test_rejects_single_sample(self):
        with pytest.raises(TooShort):
            Trajectory([0.0], [0.0], [0.0])

    def test_non_uniform(self):
        t = np.r_[np.arange(20) * 0.1, 2.5]
        with pytest.raises(NonUniformSampling):
            Trajectory(t, t, t).check_uniform()

    def test_jitter_within_tolerance(self):
        t = np.arange(20) * 0.1
        t[5] += 0.0005
        assert Trajectory(t, t, t).check_uniform() == pytest.approx(0.1)


class TestSavitzkyGolay:
    @pytest.mark.parametrize("window, degree", [(10, 3), (11, 11), (5, 7)])
    def test_config_validation(self, window, degree):
        with pytest.raises(InvalidParameters):
            SgConfig(poly_degree=degree, window_len=window)

    def test_cubic_reproduced(self):
        t = np.linspace(-2, 3, 50)
        x = t ** 3 - 2 * t
        out = sg_smooth(Trajectory(t, x, np.zeros_like(t)))
        np.testing.assert_allclose(out.x[5:-5], x[5:-5], atol=1e-9)

    @pytest.mark.parametrize("degree", [0, 1, 2, 3])
    def test_polynomials_everywhere(self, degree):
        # the boundary fit uses the same degree, so edges are exact too
        t = np.arange(40) * 0.1
        x = np.polyval(np.arange(1, degree + 2), t)
        out = sg_smooth(Trajectory(t, x, -x))
        np.testing.assert_allclose(out.x, x, atol=1e-9)
        np.testing.assert_allclose(out.y, -x, atol=1e-9)

    def test_constant(self):
        t = np.arange(30) * 0.1
        out = sg_smooth(Trajectory(t, np.full(30, 4.2), np.full(30, -1.0)))
        np.testing.assert_allclose(out.x, 4.2, atol=1e-12)
        np.testing.assert_allclose(out.y, -1.0, atol=1e-12)

    def test_idempotent_on_cubic(self):
        t = np.arange(50) * 0.1
        x = 0.5 * t ** 3 - t ** 2 + 3
        once = sg_smooth(Trajectory(t, x, x))
        twice = sg_smooth(once)
        np.testing.assert_allclose(twice.x, once.x, atol=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), c=st.floats(-3, 3))
    def test_linear(self, seed, c):
        rng = np.random.default_rng(seed)
        t = np.arange(40) * 0.1
        a, b = rng.normal(size=(2, 40))
        sa = sg_smooth(Trajectory(t, a, b))
        sb = sg_smooth(Trajectory(t, b, a))
        sab = sg_smooth(Trajectory(t, a + c * b, b + c * a))
        np.testing.assert_allclose(sab.x, sa.x + c * sb.x, atol=1e-9)

    def test_noise_variance_reduced(self):
        t = np.arange(100) * 0.1
        clean = np.sin(t)
        for seed in range(100):
            noisy = clean + np.random.default_rng(seed).normal(0, 0.1, t.size)
            out = sg_smooth(Trajectory(t, noisy, noisy))
            assert np.var(out.x - clean) < np.var(noisy - clean)

    def test_too_short(self):
        t = np.arange(8) * 0.1
        with pytest.raises(TooShort):
            sg_smooth(Trajectory(t, t, t))


class TestEkf:
    def test_stationary(self):
        t = np.arange(40) * 0.1
        st_ = ekf_smooth(Trajectory(t, np.full(40, 3.0), np.full(40, -2.0)))
        assert np.all(np.abs(st_.speed[20:]) < 0.05)

    def test_straight_line(self):
        st_ = ekf_smooth(line())
        assert np.all(np.abs(st_.speed[-20:] - 10.0) <= 0.5)

    def test_circle(self):
        st_ = ekf_smooth(circle())
        tail = slice(-50, None)
        assert np.all(np.abs(st_.speed[tail] - 10.0) <= 0.5)
        assert np.all(np.abs(st_.yaw_rate[tail] - 0.2) <= 0.02)

    def test_noisy_line_close(self):
        rng = np.random.default_rng(3)
        tr = line(n=100)
        noisy = Trajectory(tr.t, tr.x + rng.normal(0, 0.05, 100), tr.y + rng.normal(0, 0.05, 100))
        st_ = ekf_smooth(noisy)
        assert abs(np.mean(st_.speed[-30:]) - 10.0) < 0.5

    @pytest.mark.parametrize("traj", [line(), circle()], ids=["line", "circle"])
    def test_covariance_trace_positive(self, traj):
        st_ = ekf_smooth(traj)
        assert np.all(np.isfinite(st_.cov_trace))
        assert np.all(st_.cov_trace > 0)

    def test_config_validation(self):
        with pytest.raises(InvalidParameters):
            EkfConfig(position_std=0.0)

    def test_too_short(self):
        with pytest.raises(TooShort):
            ekf_smooth(line(n=4))


class TestDerivatives:
    def test_ramp(self):
        t = np.arange(20) * 0.1
        np.testing.assert_allclose(derivative_series(2 * t + 1, 0.1, 1), 2.0, atol=1e-12)

    def test_quadratic_second_derivative(self):
        t = np.arange(30) * 0.1
        np.testing.assert_allclose(derivative_series(0.5 * t ** 2, 0.1, 2), 1.0, atol=1e-9)

    def test_cubic_third_derivative(self):
        t = np.arange(30) * 0.1
        np.testing.assert_allclose(derivative_series(t ** 3, 0.1, 3), 6.0, atol=1e-6)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_constant_is_zero(self, order):
        np.testing.assert_allclose(derivative_series(np.full(12, 7.5), 0.1, order), 0.0, atol=1e-9)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_length_preserved(self, order):
        assert len(derivative_series(np.arange(9.0), 0.1, order)) == 9

    def test_shortest_series(self):
        # four samples carry a cubic exactly
        np.testing.assert_allclose(derivative_series(np.arange(4.0) ** 3, 1.0, 3), 6.0, atol=1e-9)

    def test_too_short(self):
        with pytest.raises(TooShort):
            derivative_series([1.0, 2.0], 0.1, 2)

    def test_bad_order(self):
        with pytest.raises(InvalidParameters):
            derivative_series(np.arange(10.0), 0.1, 4)
