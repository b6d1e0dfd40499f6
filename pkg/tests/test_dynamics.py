import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupled_ch.dynamics import (
    NonFiniteStateError,
    SolutionState,
    apriori_check,
    quadratic_bundle,
    rhs_arrays,
    rhs_state,
    rhs_w,
    rhs_wx,
)
from coupled_ch.evolution import energy
from coupled_ch.grid import PeriodicField, PeriodicGrid, derivative
from coupled_ch.kernel import COTH_HALF


def momentum_form_rhs(u, v):
    """Oracle from the local momentum equations, m = u - u_xx, n = v - v_xx:

        m_t = -(2 m u_x + m_x u + (m v)_x + n v_x)
        n_t = -(2 n v_x + n_x v + (n u)_x + m u_x)

    followed by u_t = (1 - d^2)^{-1} m_t.  Plain numpy, no dealiasing, so it
    is exact only for data whose products stay below the Nyquist mode.
    """
    n = u.size
    kk = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)

    def d(f, order=1):
        return np.fft.ifft(kk**order * np.fft.fft(f)).real

    m = u - d(u, 2)
    nn = v - d(v, 2)
    ux, vx = d(u), d(v)
    mt = -(2 * m * ux + d(m) * u + d(m * v) + nn * vx)
    nt = -(2 * nn * vx + d(nn) * v + d(nn * u) + m * ux)
    inv = 1.0 / (1.0 - kk**2)
    return np.fft.ifft(inv * np.fft.fft(mt)).real, np.fft.ifft(inv * np.fft.fft(nt)).real


def _low_mode_pair(grid, rng, kmax=4):
    x = grid.nodes
    u = np.zeros(grid.n)
    v = np.zeros(grid.n)
    for k in range(1, kmax + 1):
        a, b, c, e = rng.normal(size=4) / k**2
        u += a * np.cos(2 * np.pi * k * x) + b * np.sin(2 * np.pi * k * x)
        v += c * np.cos(2 * np.pi * k * x) + e * np.sin(2 * np.pi * k * x)
    return u + rng.normal() * 0.1, v + rng.normal() * 0.1


class TestSolutionState:
    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            SolutionState(0.0, PeriodicField.zeros(PeriodicGrid(16)), PeriodicField.zeros(PeriodicGrid(32)))

    def test_w(self):
        g = PeriodicGrid(16)
        s = SolutionState.from_arrays(g, np.ones(16), 2 * np.ones(16), t=0.5)
        assert s.t == 0.5
        np.testing.assert_array_equal(s.w.values, 3.0)


class TestRightHandSide:
    def test_matches_momentum_form(self, rng):
        g = PeriodicGrid(128)
        for _ in range(4):
            u, v = _low_mode_pair(g, rng)
            du, dv = rhs_arrays(g, u, v)
            mu, mv = momentum_form_rhs(u, v)
            scale = 1.0 + np.max(np.abs(mu)) + np.max(np.abs(mv))
            assert np.max(np.abs(du - mu)) < 1e-11 * scale
            assert np.max(np.abs(dv - mv)) < 1e-11 * scale

    def test_single_component_is_scalar_ch(self):
        # v = 0: u_t + u u_x = -d_x P*(u^2 + u_x^2/2), and v stays at rest only if P*(u_x v) terms vanish
        g = PeriodicGrid(64)
        u = np.sin(2 * np.pi * g.nodes)
        du, dv = rhs_arrays(g, u, np.zeros(64))
        mu, mv = momentum_form_rhs(u, np.zeros(64))
        np.testing.assert_allclose(du, mu, atol=1e-11)
        np.testing.assert_allclose(dv, mv, atol=1e-11)

    def test_swap_symmetry_is_exact(self, band_limited):
        g = PeriodicGrid(128)
        u, v = band_limited(g, 30), band_limited(g, 30)
        du, dv = rhs_state(SolutionState(0.0, u, v))
        su, sv = rhs_state(SolutionState(0.0, v, u))
        np.testing.assert_array_equal(du.values, sv.values)
        np.testing.assert_array_equal(dv.values, su.values)

    def test_equal_components_stay_equal(self, band_limited):
        g = PeriodicGrid(128)
        u = band_limited(g, 30)
        du, dv = rhs_state(SolutionState(0.0, u, u))
        np.testing.assert_array_equal(du.values, dv.values)

    def test_non_finite_raises(self):
        g = PeriodicGrid(16)
        u = np.full(16, 1e200)
        with pytest.raises(NonFiniteStateError):
            rhs_arrays(g, u, u)

    def test_dealias_flag_only_matters_for_high_modes(self, rng):
        g = PeriodicGrid(128)
        u, v = _low_mode_pair(g, rng)
        a = rhs_arrays(g, u, v, dealias=True)
        b = rhs_arrays(g, u, v, dealias=False)
        np.testing.assert_allclose(a[0], b[0], atol=1e-12)


class TestCombinedSpeed:
    def test_w_equation_consistent(self, band_limited):
        g = PeriodicGrid(128)
        s = SolutionState(0.0, band_limited(g, 20), band_limited(g, 20))
        du, dv = rhs_state(s)
        w = s.w
        lhs = du + dv + w * derivative(w)
        assert (rhs_w(s) - lhs).max_abs() < 1e-10

    def test_slope_equation_consistent(self, rng):
        # d_t w_x + w w_xx = d_x(rhs_w) - w_x^2
        g = PeriodicGrid(128)
        u, v = _low_mode_pair(g, rng)
        s = SolutionState.from_arrays(g, u, v)
        wx = derivative(s.w)
        expected = derivative(rhs_w(s)) - wx * wx
        assert (rhs_wx(s) - expected).max_abs() < 1e-10

    def test_bundle_formula(self):
        g = PeriodicGrid(64)
        x = g.nodes
        s = SolutionState.from_arrays(g, np.sin(2 * np.pi * x), np.cos(2 * np.pi * x))
        c = 2 * np.pi
        expected = 1.5 + np.sin(2 * np.pi * x) * np.cos(2 * np.pi * x) - 2 * c * c * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * x)
        np.testing.assert_allclose(quadratic_bundle(s).values, expected, atol=1e-11)


class TestApriori:
    def test_bounds_hold_for_smooth_data(self, band_limited):
        g = PeriodicGrid(128)
        s = SolutionState(0.0, band_limited(g, 10), band_limited(g, 10))
        rep = apriori_check(s, energy(s))
        assert not rep.violated
        assert rep.bound_uv == pytest.approx(0.5 * energy(s))
        assert rep.bound_conv == pytest.approx(2 * COTH_HALF * energy(s))
        assert rep.max_uv_sq <= rep.bound_uv

    def test_flags_an_understated_energy(self, band_limited):
        g = PeriodicGrid(64)
        s = SolutionState(0.0, band_limited(g, 5), band_limited(g, 5))
        assert apriori_check(s, 1e-3 * energy(s)).violated


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2, allow_nan=False), st.floats(-2, 2, allow_nan=False))
def test_constant_states_are_steady(a, b):
    g = PeriodicGrid(32)
    du, dv = rhs_arrays(g, np.full(32, a), np.full(32, b))
    assert np.max(np.abs(du)) < 1e-12 and np.max(np.abs(dv)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 3.0))
def test_rhs_is_quadratic(seed, lam):
    rng = np.random.default_rng(seed)
    g = PeriodicGrid(64)
    u, v = _low_mode_pair(g, rng)
    du, dv = rhs_arrays(g, u, v)
    su, sv = rhs_arrays(g, lam * u, lam * v)
    np.testing.assert_allclose(su, lam**2 * du, atol=1e-9 * lam**2 * (1 + np.max(np.abs(du))))
    np.testing.assert_allclose(sv, lam**2 * dv, atol=1e-9 * lam**2 * (1 + np.max(np.abs(dv))))
