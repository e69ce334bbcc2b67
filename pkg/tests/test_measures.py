import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import hermite_e

from ifock.errors import (
    InvalidMeasure,
    NonFiniteValue,
    PositivityViolation,
    SpecParseError,
    UnsupportedOrder,
)
from ifock.measures import (
    POISSON_TAIL_MASS,
    MeasureSpec,
    check_hankel,
    hankel_minors,
    integrate,
    make_quadrature,
    moment,
    moments,
    parse_measure,
)


def hermegauss_moment(k, m=0.0, var=1.0, nodes=60):
    # independent oracle: numpy's probabilists' Gauss-Hermite rule
    x, w = hermite_e.hermegauss(nodes)
    w = w / w.sum()
    return float(np.sum(w * (m + math.sqrt(var) * x) ** k))


def poisson_moment_sum(k, a, terms=200):
    # direct sum of k^j e^-a a^j / j!
    return math.fsum(j ** k * math.exp(-a + j * math.log(a) - math.lgamma(j + 1)) if j else (0.0 ** k) * math.exp(-a)
                     for j in range(terms))


class TestMoments:
    def test_gaussian_fourth_moment(self):
        assert moment(MeasureSpec.gaussian(0, 1), 4) == 3
        assert hermegauss_moment(4) == pytest.approx(3, rel=1e-13)

    def test_total_mass(self):
        assert moment(MeasureSpec.gaussian(0.3, 2.0), 0) == 1
        assert moment(MeasureSpec.poisson(2.5), 0) == 1

    def test_poisson_second_moment(self):
        assert moment(MeasureSpec.poisson(1), 2) == 2
        assert poisson_moment_sum(2, 1.0) == pytest.approx(2, rel=1e-15)

    @pytest.mark.parametrize("m,var", [(0.0, 1.0), (0.5, 1.3), (-1.5, 0.7)])
    def test_gaussian_against_hermegauss(self, m, var):
        got = moments(MeasureSpec.gaussian(m, var), 12)
        for k, v in enumerate(got):
            assert v == pytest.approx(hermegauss_moment(k, m, var), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("a", [0.4, 1.0, 2.7])
    def test_poisson_against_direct_sum(self, a):
        got = moments(MeasureSpec.poisson(a), 10)
        for k, v in enumerate(got):
            assert v == pytest.approx(poisson_moment_sum(k, a), rel=1e-12)

    def test_exact_parameters_give_fractions(self):
        got = moments(MeasureSpec.poisson(2), 5)
        assert all(isinstance(v, Fraction) for v in got)
        # Touchard polynomials at a = 2
        assert got == [1, 2, 6, 22, 94, 454]

    def test_forced_exact_on_float_parameter(self):
        got = moments(MeasureSpec.gaussian(0.5, 1.3), 4, exact=True)
        assert got[2] == Fraction(0.5) ** 2 + Fraction(1.3)

    def test_raw_too_short(self):
        spec = MeasureSpec.raw([1, 0, 1])
        assert moment(spec, 2) == 1
        with pytest.raises(UnsupportedOrder):
            moment(spec, 3)


class TestHankel:
    def test_gaussian_minors_are_superfactorials(self):
        seq = moments(MeasureSpec.gaussian(0, 1), 10)
        minors = hankel_minors(seq, 5)
        # det of the (k+1)x(k+1) Hankel matrix is prod_{j<=k} j!
        expected = [math.prod(math.factorial(j) for j in range(k + 1)) for k in range(6)]
        assert minors == expected

    def test_variance_violation(self):
        # m2 < m1^2
        with pytest.raises(PositivityViolation):
            check_hankel([1, 1, Fraction(1, 2)], 1)

    @pytest.mark.parametrize("spec", [MeasureSpec.gaussian(Fraction(1, 2), Fraction(13, 10)), MeasureSpec.poisson(Fraction(27, 10))])
    def test_named_sequences_pass(self, spec):
        check_hankel(moments(spec, 24), 12)


class TestQuadrature:
    def test_two_node_gaussian_rule(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1), 3)
        assert len(q) == 2
        np.testing.assert_allclose(np.sort(q.nodes), [-1, 1], atol=1e-14)
        np.testing.assert_allclose(q.weights, [0.5, 0.5], atol=1e-14)

    def test_one_node_rule(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 2.5), 1)
        assert len(q) == 1
        assert q.nodes[0] == pytest.approx(0, abs=1e-15)
        assert q.weights[0] == pytest.approx(1)

    def test_matches_hermegauss(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1), 19)
        x, w = hermite_e.hermegauss(10)
        np.testing.assert_allclose(np.sort(q.nodes), x, atol=1e-13)
        np.testing.assert_allclose(q.weights[np.argsort(q.nodes)], w / w.sum(), rtol=1e-12)

    def test_poisson_lattice(self):
        q = make_quadrature(MeasureSpec.poisson(1), 4)
        k = np.arange(len(q))
        np.testing.assert_array_equal(q.nodes, k)
        expected = np.array([math.exp(-1) / math.factorial(int(j)) for j in k])
        np.testing.assert_allclose(q.weights, expected, rtol=1e-14)
        assert 1 - q.weights.sum() < POISSON_TAIL_MASS + 1e-16

    @pytest.mark.parametrize("spec", [
        MeasureSpec.gaussian(0.5, 1.3),
        MeasureSpec.gaussian(-2, 0.25),
        MeasureSpec.poisson(2.7),
        MeasureSpec.poisson(0.3),
        MeasureSpec.raw([1, 0, 1, 0, 3, 0, 15, 0, 105, 0, 945, 0]),
    ])
    def test_exactness(self, spec):
        q = make_quadrature(spec, 11)
        assert q.weights.sum() == pytest.approx(1, abs=1e-12)
        assert np.all(q.weights > 0)
        exact = moments(spec, q.exactness_degree)
        for k in range(q.exactness_degree + 1):
            got = integrate(q, lambda x: x ** k)
            scale = max(abs(float(exact[k])), float(np.dot(q.weights, np.abs(q.nodes) ** k)))
            assert abs(got - float(exact[k])) <= 1e-10 * scale

    def test_variance(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1.7), 2)
        assert integrate(q, lambda x: x ** 2) == pytest.approx(1.7, rel=1e-14)

    def test_hermite_norm(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1), 4)
        assert integrate(q, lambda x: (x ** 2 - 1) ** 2) == pytest.approx(2, rel=1e-14)

    def test_complex_integrand(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1), 5)
        assert integrate(q, lambda x: 1j * x ** 2) == pytest.approx(1j)

    def test_non_finite(self):
        q = make_quadrature(MeasureSpec.gaussian(0, 1), 3)
        with pytest.raises(NonFiniteValue), np.errstate(divide="ignore"):
            integrate(q, lambda x: 1 / (x - q.nodes[0]))

    def test_raw_positivity_enforced(self):
        with pytest.raises(PositivityViolation):
            make_quadrature(MeasureSpec.raw([1, 1, 0.5, 1]), 3)


class TestParse:
    def test_named(self):
        g = parse_measure("gaussian:m=0.5,var=1.3")
        assert (g.kind, g.mean, g.variance) == ("gaussian", 0.5, 1.3)
        assert parse_measure("poisson:a=2").a == 2
        assert isinstance(parse_measure("poisson:a=2").a, int)

    def test_raw(self):
        r = parse_measure("raw:[1, 0, 1.0, 0, 3]")
        assert r.moments == (1, 0, 1, 0, 3)
        assert r.exact_parameters

    @pytest.mark.parametrize("text", ["gaussian", "gaussian:m=0", "poisson:a=x", "raw:1,2", "beta:a=1", "raw:[1,\"a\"]", "poisson:a=nan"])
    def test_malformed(self, text):
        with pytest.raises(SpecParseError):
            parse_measure(text)

    @pytest.mark.parametrize("text", ["gaussian:m=0,var=-1", "poisson:a=0", "raw:[2,0,1]"])
    def test_invalid(self, text):
        with pytest.raises(InvalidMeasure):
            parse_measure(text)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-1e3, 1e3, allow_nan=False), st.floats(1e-3, 1e3))
    def test_roundtrip(self, m, var):
        spec = MeasureSpec.gaussian(m, var)
        assert parse_measure(spec.to_text()) == spec
