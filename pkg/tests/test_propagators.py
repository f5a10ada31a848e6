"""Free flow, gauge factor, power map, and exact nonlinear flow checks."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from nlslab import (
    ComplexField,
    Grid,
    NonlinearityParams,
    PointwiseBlowUp,
    Space,
    apply_multiplier,
    blowup_horizon,
    fourier_forward,
    free_propagate,
    g_p,
    gauge_multiply,
    nonlinear_flow_exact,
)


def gaussian_field(grid, width=1.0, k0=0.0):
    x2 = grid.abs_x_sq
    mod = np.exp(1j * k0 * grid.x_mesh[0])
    return ComplexField(grid, Space.PHYSICAL, np.exp(-x2 / (2 * width**2)) * mod)


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return ComplexField(grid, Space.PHYSICAL, v)


def params_for(lam, b, d=1):
    # b = 2*theta/d, so theta = b*d/2
    return NonlinearityParams(lam=lam, theta=b * d / 2.0, d=d)


class TestFreePropagate:
    def test_t0_identity(self):
        g = Grid(1, 64, 8.0)
        f = random_field(g, seed=1)
        out = free_propagate(f, 0.0)
        assert np.array_equal(out.values, f.values)

    def test_free_gaussian_closed_form(self):
        # closed form (1+it)^{-1/2} exp(-x^2/(2(1+it))); cross-checked against
        # direct quadrature of the Schrodinger kernel, e.g. at (t,x)=(1,0.625)
        # the kernel integral gives 0.7297051591590996-0.2217668891439596j
        # (adaptive quad, agrees with the closed form to 6e-17).
        # box wide enough that the dispersed tail stays below the tolerance
        g = Grid(1, 1024, 40.0)
        f = gaussian_field(g)
        for t in (0.5, 1.0, 2.5, 5.0):
            out = free_propagate(f, t)
            expected = (1 + 1j * t) ** -0.5 * np.exp(-g.x_1d**2 / (2 * (1 + 1j * t)))
            assert np.max(np.abs(out.values - expected)) < 1e-8
        # pin the propagated value at the frozen kernel-quadrature point
        out = free_propagate(f, 1.0)
        j = np.argmin(np.abs(g.x_1d - 0.625))
        assert g.x_1d[j] == pytest.approx(0.625, abs=1e-12)
        assert out.values[j] == pytest.approx(0.7297051591590996 - 0.2217668891439596j, abs=1e-10)

    def test_unitarity(self):
        g = Grid(1, 256, 10.0)
        f = random_field(g, seed=7)
        out = free_propagate(f, 3.7)
        n0 = np.linalg.norm(f.values)
        assert abs(np.linalg.norm(out.values) - n0) / n0 < 1e-12

    def test_group_law(self):
        g = Grid(1, 128, 10.0)
        f = random_field(g, seed=8)
        a = free_propagate(free_propagate(f, 1.3), 2.1)
        b = free_propagate(f, 3.4)
        assert np.max(np.abs(a.values - b.values)) / np.max(np.abs(f.values)) < 1e-12

    def test_inverse(self):
        g = Grid(2, 32, 6.0)
        f = random_field(g, seed=9)
        out = free_propagate(free_propagate(f, 2.2), -2.2)
        assert np.max(np.abs(out.values - f.values)) / np.max(np.abs(f.values)) < 1e-12

    def test_commutes_with_transform(self):
        g = Grid(1, 128, 9.0)
        f = random_field(g, seed=10)
        t = 1.9
        a = fourier_forward(free_propagate(f, t))
        b = fourier_forward(f)
        b.values *= np.exp(-0.5j * t * g.abs_xi_sq)
        assert np.max(np.abs(a.values - b.values)) / np.max(np.abs(b.values)) < 1e-12


class TestGauge:
    def test_round_trip(self):
        g = Grid(1, 128, 8.0)
        f = random_field(g, seed=12)
        out = gauge_multiply(gauge_multiply(f, 0.7), 0.7, inverse=True)
        assert np.max(np.abs(out.values - f.values)) < 1e-14

    def test_modulus_preserved(self):
        g = Grid(2, 16, 4.0)
        f = random_field(g, seed=13)
        out = gauge_multiply(f, 1.4)
        assert np.max(np.abs(np.abs(out.values) - np.abs(f.values))) < 1e-14

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_requires_positive_time(self, t):
        g = Grid(1, 16, 2.0)
        with pytest.raises(ValueError):
            gauge_multiply(gaussian_field(g), t)

    @pytest.mark.parametrize("s", [1.2, 2.0])
    def test_factorization_identity(self, s):
        # U(t) |x|^s U(t)^{-1} f  ==  M(t) (-t^2 Lap)^{s/2} M(t)^{-1} f.
        # The two sides are built from independent primitives (free flow +
        # pointwise weight vs gauge factor + spectral fractional Laplacian).
        # A modulated Gaussian keeps the field away from the |x|^s kink and
        # its spectrum away from the |xi|^s kink, so the comparison is clean.
        t, k0 = 1.0, 10.0
        g = Grid(1, 2048, 30.0)
        phi = gaussian_field(g, k0=k0)
        back = free_propagate(phi, -t)
        weighted = ComplexField(g, Space.PHYSICAL, np.abs(g.x_1d) ** s * back.values)
        lhs = free_propagate(weighted, t)
        m_inv = gauge_multiply(phi, t, inverse=True)
        frac = apply_multiplier(m_inv, lambda xi: (t * t * xi * xi) ** (s / 2.0))
        rhs = gauge_multiply(frac, t)
        scale = np.max(np.abs(lhs.values))
        assert np.max(np.abs(lhs.values - rhs.values)) / scale < 1e-6


class TestPowerMap:
    def test_zero(self):
        assert g_p(0.0, 1.5) == 0.0
        assert g_p(0.0 + 0.0j, 2.7) == 0.0

    def test_cubic_example(self):
        # p = 3: |1+i|^2 (1+i) = 2 + 2i
        assert g_p(1 + 1j, 3.0) == pytest.approx(2 + 2j)

    def test_requires_p_above_one(self):
        with pytest.raises(ValueError):
            g_p(1.0, 1.0)

    @pytest.mark.parametrize("p", [1.5, 2.0, 2.5, 3.0])
    def test_lipschitz_bound(self, p):
        # |G_p(z) - G_p(w)| <= p (|z|+|w|)^{p-1} |z-w| on 1e5 random pairs
        rng = np.random.default_rng(hash(p) % 2**32)
        z = rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)
        w = rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000)
        lhs = np.abs(g_p(z, p) - g_p(w, p))
        rhs = p * (np.abs(z) + np.abs(w)) ** (p - 1) * np.abs(z - w)
        assert np.all(lhs <= rhs * (1 + 1e-12))


class TestNonlinearFlow:
    def test_amplifying_example(self):
        # lam = i, b = 1: |w(dt)| = |z| / (1 - |z| dt), phase frozen
        params = params_for(1j, b=1.0)
        w = nonlinear_flow_exact(1.0 + 0.0j, 0.5, params)
        assert abs(w) == pytest.approx(2.0, rel=1e-14)
        assert np.angle(w) == pytest.approx(0.0, abs=1e-14)

    def test_real_lambda_rotates(self):
        params = params_for(1.0 + 0.0j, b=1.0)
        z = 0.7 * np.exp(0.3j)
        w = nonlinear_flow_exact(z, 2.0, params)
        assert abs(w) == pytest.approx(abs(z), rel=1e-14)
        assert np.angle(w) == pytest.approx(0.3 - abs(z) * 2.0, abs=1e-12)

    def test_blowup_at_denominator_zero(self):
        params = params_for(1j, b=1.0)
        with pytest.raises(PointwiseBlowUp):
            nonlinear_flow_exact(1.0 + 0.0j, 1.0, params)

    def test_horizon(self):
        params = params_for(2j, b=1.0)
        assert blowup_horizon(1.0, params) == pytest.approx(0.5)
        assert blowup_horizon(0.0, params) == np.inf
        assert blowup_horizon(1.0, params_for(-1j, b=1.0)) == np.inf

    def test_zero_stays_zero(self):
        params = params_for(1j, b=0.8)
        assert nonlinear_flow_exact(0.0 + 0.0j, 5.0, params) == 0.0

    @given(
        st.floats(0.01, 0.39),
        st.floats(0.01, 0.39),
        st.floats(-2.0, 2.0),
        st.floats(0.3, 2.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_semigroup(self, f1, f2, re_lam, b):
        params = params_for(complex(re_lam, 1.0), b=b)
        z = 0.9 * np.exp(0.7j)
        # steps are fractions of the pointwise horizon, so no blow-up occurs
        hor = blowup_horizon(z, params)
        dt1, dt2 = f1 * hor, f2 * hor
        w_two = nonlinear_flow_exact(nonlinear_flow_exact(z, dt1, params), dt2, params)
        w_one = nonlinear_flow_exact(z, dt1 + dt2, params)
        assert abs(w_two - w_one) / abs(w_one) < 1e-12

    @given(st.floats(0.05, 0.9), st.floats(0.2, 2.0))
    @settings(max_examples=40, deadline=None)
    def test_modulus_monotone_in_sign_of_mu(self, frac, b):
        z = 1.0 + 0.5j
        dt = frac * blowup_horizon(z, params_for(0.3 + 1j, b=b))
        grow = nonlinear_flow_exact(z, dt, params_for(0.3 + 1j, b=b))
        decay = nonlinear_flow_exact(z, dt, params_for(0.3 - 1j, b=b))
        neutral = nonlinear_flow_exact(z, dt, params_for(0.3 + 0j, b=b))
        assert abs(grow) > abs(z)
        assert abs(decay) < abs(z)
        assert abs(neutral) == pytest.approx(abs(z), rel=1e-14)

    def test_against_adaptive_ode(self):
        # independent oracle: high-order adaptive integration of the pointwise ODE
        rng = np.random.default_rng(42)
        params_draws = []
        for _ in range(20):
            b = rng.uniform(0.2, 2.0)
            lam = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2.0))
            z = rng.uniform(0.2, 1.2) * np.exp(1j * rng.uniform(-np.pi, np.pi))
            params = params_for(lam, b=b)
            dt = 0.5 * blowup_horizon(z, params)
            params_draws.append((z, dt, params))

        for z, dt, params in params_draws:
            def rhs(t, y):
                w = y[0] + 1j * y[1]
                dw = -1j * params.lam * abs(w) ** params.b * w
                return [dw.real, dw.imag]

            sol = solve_ivp(rhs, (0.0, dt), [z.real, z.imag], method="DOP853",
                            rtol=1e-12, atol=1e-14)
            w_ode = sol.y[0, -1] + 1j * sol.y[1, -1]
            w_exact = nonlinear_flow_exact(z, dt, params)
            assert abs(w_ode - w_exact) / abs(w_exact) < 1e-10

    def test_vectorized_matches_scalar(self):
        params = params_for(0.5 + 1j, b=1.2)
        rng = np.random.default_rng(3)
        z = rng.standard_normal(40) * 0.3 + 1j * rng.standard_normal(40) * 0.3
        dt = 0.2
        vec = nonlinear_flow_exact(z, dt, params)
        for j in range(0, 40, 7):
            assert vec[j] == pytest.approx(nonlinear_flow_exact(complex(z[j]), dt, params), rel=1e-14)


class TestParams:
    def test_derived_exponents(self):
        p = NonlinearityParams(lam=1j, theta=0.5, d=1)
        assert p.b == pytest.approx(1.0)
        assert p.p == pytest.approx(2.0)
        q = NonlinearityParams(lam=1j, theta=1.0, d=2)
        assert q.b == pytest.approx(1.0)

    @pytest.mark.parametrize("theta,d", [(0.0, 1), (1.5, 1), (0.5, 4)])
    def test_rejects_out_of_range(self, theta, d):
        with pytest.raises(ValueError):
            NonlinearityParams(lam=1j, theta=theta, d=d)
