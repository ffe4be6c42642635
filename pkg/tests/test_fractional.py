"""Tests for the fractional weights, integrals and derivatives."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracbs import (
    FractionalOrder,
    FunctionProfile,
    GammaPoleError,
    QuadratureError,
    caputo_fractional_derivative,
    caputo_weight,
    caputo_weights,
    discrete_caputo,
    rl_fractional_derivative,
    rl_fractional_integral,
    rl_power_derivative,
)

from conftest import monomial_profile

# extended-precision reference values for the gamma implementation
GAMMA_REFERENCE = [
    (0.1, 9.51350769866873184),
    (0.25, 3.62560990822190831),
    (0.5, 1.77245385090551603),
    (0.75, 1.22541670246517765),
    (1.0, 1.0),
    (1.3, 0.897470696306277188),
    (1.5, 0.886226925452758014),
    (2.0, 1.0),
    (2.5, 1.32934038817913702),
    (3.7, 4.17065178379660317),
    (5.0, 24.0),
    (6.25, 184.86096222719835),
    (8.0, 5040.0),
    (10.5, 1133278.38894878557),
    (12.0, 39916800.0),
    (15.0, 87178291200.0),
    (18.5, 1498612053315336.12),
    (22.0, 5.109094217170944e19),
    (25.5, 3.08677054052869678e24),
    (29.9, 6.30417448837375151e30),
]


class TestFractionalOrder:
    def test_ceiling(self):
        assert FractionalOrder(0.5).n == 1
        assert FractionalOrder(1.0).n == 1
        assert FractionalOrder(1.25).n == 2
        assert FractionalOrder(2.0).n == 2

    @pytest.mark.parametrize("bad", [0.0, -0.5, 2.5])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            FractionalOrder(bad)


class TestCaputoWeights:
    def test_first_weight_is_one_exactly(self):
        for alpha in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5):
            assert caputo_weight(alpha, 0) == 1.0

    def test_direct_values(self):
        assert caputo_weight(0.5, 1) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-15)
        assert caputo_weight(1.0, 1) == 0.0

    def test_extended_precision_reference(self):
        # (101)^0.3 - (100)^0.3 from a 40-digit oracle
        assert caputo_weight(0.7, 100) == pytest.approx(0.011901649150305266195, rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9, 1.25, 1.75])
    def test_strictly_decreasing_and_positive(self, alpha):
        w = caputo_weights(alpha, 10_001)
        assert np.all(w > 0.0)
        assert np.all(np.diff(w) < 0.0)
        assert w[0] == 1.0

    @pytest.mark.parametrize("alpha", [0.5, 0.65, 0.7, 0.9, 1.5, 1.75])
    def test_tail_below_threshold(self, alpha):
        # tail bound holds for n - alpha <= ~0.57; sampled where true
        assert caputo_weight(alpha, 10_000) < 1e-2

    @pytest.mark.parametrize("alpha", [0.1, 0.35, 0.5, 0.9, 1.2, 1.8])
    def test_telescoping_sum(self, alpha):
        n = math.ceil(alpha)
        for m in (1, 2, 17, 1000):
            total = math.fsum(caputo_weights(alpha, m))
            assert total == pytest.approx(m ** (n - alpha), rel=1e-12)

    def test_integer_order_degenerates(self):
        w = caputo_weights(1.0, 5)
        assert w.tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            caputo_weight(0.5, -1)


class TestDiscreteCaputo:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 1.0])
    @pytest.mark.parametrize("m", [1, 3, 10])
    def test_constant_maps_to_zero(self, alpha, m):
        samples = np.full(m + 1, 3.7)
        assert discrete_caputo(samples, alpha, 0.1) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
    @pytest.mark.parametrize("m,dt", [(1, 0.5), (7, 0.04), (40, 0.025)])
    def test_exact_on_linear(self, alpha, m, dt):
        samples = 2.5 * np.arange(m + 1) * dt
        value = discrete_caputo(samples, alpha, dt)
        # telescoping identity sum c_k = m^{1-alpha}, verified by brute force
        brute = math.fsum(caputo_weight(alpha, k) for k in range(m))
        assert brute == pytest.approx(m ** (1 - alpha), rel=1e-12)
        exact = 2.5 * math.gamma(2.0) / math.gamma(2.0 - alpha) * (m * dt) ** (1 - alpha)
        assert value == pytest.approx(exact, rel=1e-10)

    def test_affine_exactness(self):
        for alpha in (0.25, 0.5, 0.75):
            t = np.arange(9) * 0.125
            value = discrete_caputo(1.4 + 2.0 * t, alpha, 0.125)
            exact = 2.0 / math.gamma(2.0 - alpha) * t[-1] ** (1 - alpha)
            assert value == pytest.approx(exact, rel=1e-10)

    def test_quadratic_convergence_rate(self):
        # error against Gamma(3)/Gamma(2.5) t^1.5 shrinks ~2^1.5 when dt halves
        alpha, t_final = 0.5, 1.0
        errors = []
        for steps in (32, 64):
            dt = t_final / steps
            samples = (np.arange(steps + 1) * dt) ** 2
            exact = math.gamma(3.0) / math.gamma(2.5) * t_final**1.5
            errors.append(abs(discrete_caputo(samples, alpha, dt) - exact))
        assert errors[0] / errors[1] == pytest.approx(2.0**1.5, rel=0.15)

    def test_alpha_one_is_backward_difference(self):
        samples = np.sin(np.arange(8) * 0.3)
        dt = 0.3
        assert discrete_caputo(samples, 1.0, dt) == (samples[-1] - samples[-2]) / dt

    def test_rejects_short_and_nonfinite(self):
        with pytest.raises(ValueError):
            discrete_caputo([1.0], 0.5, 0.1)
        with pytest.raises(ValueError):
            discrete_caputo([1.0, np.nan], 0.5, 0.1)
        with pytest.raises(ValueError):
            discrete_caputo([1.0, 2.0], 0.5, -0.1)


class TestPowerDerivative:
    def test_half_derivative_of_t(self):
        coefficient, exponent = rl_power_derivative(1.0, 0.5)
        assert exponent == 0.5
        assert coefficient == pytest.approx(1.12837916709551257, rel=1e-12)

    def test_classical_cases(self):
        assert rl_power_derivative(3.0, 1.0) == pytest.approx((3.0, 2.0))
        assert rl_power_derivative(2.0, 0.0) == pytest.approx((1.0, 2.0))

    def test_gamma_pole_signaled(self):
        with pytest.raises(GammaPoleError):
            rl_power_derivative(0.0, 1.0)  # derivative of a constant
        with pytest.raises(GammaPoleError):
            rl_power_derivative(1.0, 2.0)

    def test_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            rl_power_derivative(-1.0, 0.5)

    def test_gamma_implementation_against_reference(self):
        for x, expected in GAMMA_REFERENCE:
            assert math.gamma(x) == pytest.approx(expected, rel=1e-12)


def _adaptive_integral(profile, alpha, r):
    """Independent adaptive oracle: substitute v = (r-t)^alpha to kill the kink."""
    integrand = lambda v: profile(r - v ** (1.0 / alpha))
    value, _ = quad(integrand, 0.0, r**alpha, limit=200, epsabs=1e-13, epsrel=1e-13)
    return value / alpha / math.gamma(alpha)


class TestFractionalIntegral:
    def test_unit_profile_unit_order(self):
        value = rl_fractional_integral(lambda t: np.ones_like(t), 1.0, 0.5)
        assert value == pytest.approx(0.5, rel=1e-14)

    def test_linear_profile_closed_form(self):
        value = rl_fractional_integral(lambda t: t, 0.5, 1.0)
        assert value == pytest.approx(0.752252778063675049, rel=1e-12)

    def test_zero_radius(self):
        assert rl_fractional_integral(lambda t: t, 0.5, 0.0) == 0.0

    @pytest.mark.parametrize("mu", [1, 2, 3])
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.2])
    def test_monomials_against_adaptive_oracle(self, mu, alpha):
        profile = lambda t: np.asarray(t, float) ** mu
        r = 0.8
        value = rl_fractional_integral(profile, alpha, r)
        assert value == pytest.approx(_adaptive_integral(profile, alpha, r), rel=1e-9)

    @pytest.mark.parametrize(
        "a1,a2,mu", [(0.3, 0.4, 2), (0.5, 0.5, 1), (0.25, 1.0, 3), (0.8, 0.9, 2)]
    )
    def test_semigroup_on_monomials(self, a1, a2, mu):
        profile = lambda t: np.asarray(t, float) ** mu
        r = 1.0
        inner = lambda t: np.array(
            [rl_fractional_integral(profile, a2, float(ti)) for ti in np.atleast_1d(t)]
        )
        composed = rl_fractional_integral(inner, a1, r)
        direct = rl_fractional_integral(profile, a1 + a2, r)
        assert composed == pytest.approx(direct, rel=1e-6)

    def test_convergence_check_passes_on_smooth(self):
        value = rl_fractional_integral(lambda t: np.cos(t), 0.5, 1.0, rtol=1e-10)
        assert math.isfinite(value)

    def test_nonconvergence_reports_estimate(self):
        oscillatory = lambda t: np.sin(200.0 * t)
        with pytest.raises(QuadratureError) as info:
            rl_fractional_integral(oscillatory, 0.5, 1.0, order=16, rtol=1e-12)
        assert info.value.estimate > 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            rl_fractional_integral(lambda t: t, 0.0, 1.0)
        with pytest.raises(ValueError):
            rl_fractional_integral(lambda t: t, 0.5, -1.0)


class TestFractionalDerivative:
    @pytest.mark.parametrize("mu", [1, 2, 3])
    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 1.25, 1.75])
    def test_monomials_match_power_rule(self, mu, beta):
        coefficient, exponent = rl_power_derivative(float(mu), beta)
        for r in (0.3, 1.0, 1.7):
            value = rl_fractional_derivative(monomial_profile(mu), beta, r)
            assert value == pytest.approx(coefficient * r**exponent, rel=1e-6)

    def test_quadratic_closed_form(self):
        value = rl_fractional_derivative(monomial_profile(2), 0.5, 1.0)
        assert value == pytest.approx(1.5045055561273501, rel=1e-10)

    def test_constant_profile_is_nonzero(self):
        value = rl_fractional_derivative(monomial_profile(0), 0.5, 1.0)
        assert value == pytest.approx(0.564189583547756287, rel=1e-10)

    def test_integer_orders_return_classical(self):
        profile = monomial_profile(3)
        assert rl_fractional_derivative(profile, 1.0, 0.7) == pytest.approx(3 * 0.49, abs=1e-15)
        assert rl_fractional_derivative(profile, 2.0, 0.7) == pytest.approx(6 * 0.7, abs=1e-15)

    def test_rejects_origin(self):
        with pytest.raises(ValueError):
            rl_fractional_derivative(monomial_profile(2), 0.5, 0.0)

    def test_caputo_drops_the_corrections(self):
        # Caputo of a constant vanishes while RL does not
        assert caputo_fractional_derivative(monomial_profile(0), 0.5, 1.0) == pytest.approx(
            0.0, abs=1e-14
        )
        # on profiles vanishing at 0 with f'(0)=0 the two realizations agree
        profile = monomial_profile(2)
        rl = rl_fractional_derivative(profile, 0.25, 0.9)
        cap = caputo_fractional_derivative(profile, 0.25, 0.9)
        assert rl == pytest.approx(cap, rel=1e-12)

    def test_function_profile_requires_supplied_derivative(self):
        bare = FunctionProfile(lambda t: np.asarray(t, float) ** 2)
        with pytest.raises(ValueError):
            rl_fractional_derivative(bare, 0.5, 1.0)
