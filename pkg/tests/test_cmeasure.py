import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from ifock.bargmann import TildeOperators
from ifock.cmeasure import (
    RadialMeasure,
    analytic_l2_norm_squared,
    check_carleman,
    check_uniqueness_criterion,
    mixed_moments,
    monte_carlo_defect,
    monte_carlo_mixed_moments,
    radial_moments,
    representing_measure,
    verify_norm_identity,
)
from ifock.errors import UnsupportedMeasure
from ifock.measures import MeasureSpec
from ifock.orthopoly import jacobi_from_measure


def radial_oracle(s2, n):
    # adaptive quadrature of r^(2n) (2/s2) r exp(-r^2/s2) on [0, inf)
    f = lambda r: r ** (2 * n) * 2 / s2 * r * math.exp(-r * r / s2)
    return sp_integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)[0]


class TestRadial:
    def test_mass(self):
        mu = RadialMeasure.complex_gaussian(1.3)
        assert mu.total_mass() == pytest.approx(1, abs=1e-10)
        assert radial_oracle(1.3, 0) == pytest.approx(1, abs=1e-10)

    def test_unit_density(self):
        mu = representing_measure(MeasureSpec.gaussian(0, 1))
        r = np.linspace(0, 3, 7)
        np.testing.assert_allclose(mu.radial_density(r), 2 * r * np.exp(-r ** 2))

    @pytest.mark.parametrize("s2", [0.5, 1.3, 2.0])
    def test_moments(self, s2):
        mu = RadialMeasure.complex_gaussian(s2)
        assert radial_moments(mu, 3) == pytest.approx(6 * s2 ** 3, rel=1e-12)
        for n in range(8):
            assert radial_moments(mu, n) == pytest.approx(radial_oracle(s2, n), rel=1e-9)

    def test_scale_two_first_moment(self):
        assert radial_moments(RadialMeasure.complex_gaussian(2), 1) == pytest.approx(2)

    def test_density_route(self):
        mu = RadialMeasure(density=lambda r: 2 * r * math.exp(-r * r))
        assert radial_moments(mu, 2) == pytest.approx(2, rel=1e-8)

    def test_poisson_scale(self):
        assert representing_measure(MeasureSpec.poisson(1.3)).scale == 1.3

    def test_raw_refused(self):
        with pytest.raises(UnsupportedMeasure):
            representing_measure(MeasureSpec.raw([1, 0, 1, 0]))


class TestMixedMoments:
    def test_table(self):
        g = mixed_moments(RadialMeasure.complex_gaussian(1.3), 4)
        assert g.gamma[0, 0] == 1
        assert g.gamma[1, 1] == pytest.approx(1.3)
        assert g.gamma[2, 1] == 0
        assert g.hermitian_defect() == 0
        np.testing.assert_allclose(g.diagonal(), [1.3 ** n * math.factorial(n) for n in range(5)])

    def test_same_scale_coincide(self):
        g = mixed_moments(representing_measure(MeasureSpec.gaussian(0, 2)), 6).gamma
        p = mixed_moments(representing_measure(MeasureSpec.poisson(2)), 6).gamma
        np.testing.assert_array_equal(g, p)

    def test_psd(self):
        g = mixed_moments(RadialMeasure.complex_gaussian(0.7), 6).gamma
        assert np.min(np.linalg.eigvalsh(g)) > 0

    def test_monte_carlo(self):
        mu = RadialMeasure.complex_gaussian(1.3)
        assert monte_carlo_defect(mu, 4, seed=3) <= 1e-3
        est = monte_carlo_mixed_moments(mu, 2, seed=3)
        assert est[1, 1].real == pytest.approx(1.3, rel=1e-2)

    def test_monte_carlo_seeded(self):
        mu = RadialMeasure.complex_gaussian(2)
        assert monte_carlo_defect(mu, 3, seed=7, log2_samples=12) == monte_carlo_defect(mu, 3, seed=7, log2_samples=12)


class TestCriterion:
    def test_factorial_growth(self):
        s2 = 1.3
        diag = [s2 ** n * math.factorial(n) for n in range(41)]
        rep = check_uniqueness_criterion(diag, 40)
        assert rep.satisfied
        # Stirling oracle: (n!)^(1/n) ~ (n/e) (2 pi n)^(1/(2n))
        n = 40
        stirling = s2 * (n / math.e) * (2 * math.pi * n) ** (1 / (2 * n)) / n ** 2
        assert rep.last_ratio == pytest.approx(stirling, rel=1e-3)

    def test_double_factorial_growth(self):
        diag = [float(math.factorial(2 * n)) for n in range(41)]
        rep = check_uniqueness_criterion(diag, 40)
        assert not rep.satisfied
        assert rep.limit_estimate == pytest.approx(4 / math.e ** 2, rel=0.05)

    def test_constant(self):
        rep = check_uniqueness_criterion([1.0] * 41, 40)
        assert rep.satisfied
        assert rep.ratios[9] == pytest.approx(1 / 100)

    def test_mixed_moment_input(self):
        g = mixed_moments(RadialMeasure.complex_gaussian(1), 20)
        assert check_uniqueness_criterion(g).satisfied


class TestCarleman:
    def test_factorial(self):
        logs = lambda n: n * math.log(1.3) + math.lgamma(n + 1)
        rep = check_carleman(log_lambda=logs, N=10_000)
        assert rep.diverging
        assert rep.partial_sum > 50
        assert rep.r_squared > 0.99
        # Stirling: terms ~ sqrt(e / (s2 n)), so S_N ~ 2 sqrt(e N / s2)
        assert rep.partial_sum == pytest.approx(2 * math.sqrt(math.e * 10_000 / 1.3), rel=0.02)

    def test_constant(self):
        rep = check_carleman([1.0] * 101)
        assert rep.diverging and rep.partial_sum == pytest.approx(100)

    def test_fast_growth_converges(self):
        rep = check_carleman(log_lambda=[float(n * n) for n in range(201)])
        assert not rep.diverging
        assert rep.partial_sum == pytest.approx(1 / (math.exp(0.5) - 1), rel=1e-12)

    def test_arguments(self):
        with pytest.raises(ValueError):
            check_carleman()


class TestNormIdentity:
    def test_constant_and_linear(self):
        mu = RadialMeasure.complex_gaussian(1.3)
        assert analytic_l2_norm_squared(mu, [1]) == pytest.approx(1)
        assert analytic_l2_norm_squared(mu, [1, 1]) == pytest.approx(2.3)

    @pytest.mark.parametrize("spec", [MeasureSpec.gaussian(0, 1.3), MeasureSpec.poisson(1.3)])
    def test_monomials_and_random(self, spec):
        rng = np.random.default_rng(5)
        polys = [[0] * n + [1] for n in range(9)]
        polys += [rng.uniform(-1, 1, 6) + 1j * rng.uniform(-1, 1, 6) for _ in range(5)]
        rep = verify_norm_identity(spec, polys)
        assert rep.passed
        for n in range(9):
            assert rep.rows[n]["l2_norm_sq"] == pytest.approx(1.3 ** n * math.factorial(n), rel=1e-12)


def test_decomposition_contrast():
    # with a = var = 2 the representing measures agree but the tilde fields do not
    d = 10
    fg = TildeOperators(jacobi_from_measure(MeasureSpec.gaussian(0, 2), d)).field_matrix()
    fp = TildeOperators(jacobi_from_measure(MeasureSpec.poisson(2), d)).field_matrix()
    diff = np.diag(fp - fg)
    np.testing.assert_array_equal(diff, [n + 2 for n in range(d)])
