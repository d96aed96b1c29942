import math

import numpy as np
import pytest
from scipy.integrate import quad

from nsdiag import _kernels
from nsdiag.samplers import (
    LikelihoodSpec,
    gaussian_loglike,
    loggamma_logpdf,
    loggamma_mix_loglike,
    true_logz,
)


class TestGaussian:
    def test_origin_d10(self):
        assert math.isclose(
            gaussian_loglike(np.zeros(10)), -5.0 * math.log(2 * math.pi), rel_tol=1e-12
        )

    def test_unit_offset_d2(self):
        expected = -math.log(2 * math.pi) - 0.5
        assert math.isclose(gaussian_loglike([1.0, 0.0]), expected, rel_tol=1e-12)

    def test_radial_symmetry(self):
        rng = np.random.default_rng(0)
        theta = rng.normal(size=6)
        base = gaussian_loglike(theta)
        assert math.isclose(gaussian_loglike(theta[::-1]), base, rel_tol=1e-12)
        assert math.isclose(gaussian_loglike(-theta), base, rel_tol=1e-12)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            gaussian_loglike([np.nan, 0.0])


class TestLogGamma:
    def test_value_at_origin(self):
        assert math.isclose(loggamma_logpdf(0.0, 1.0, 1.0), -1.0, rel_tol=1e-12)
        assert math.isclose(
            math.exp(loggamma_logpdf(0.0, 1.0, 1.0)), 0.36788, rel_tol=1e-4
        )

    def test_left_tail_linear(self):
        # as x -> -inf the exp term vanishes and beta*x dominates
        assert math.isclose(loggamma_logpdf(-200.0, 1.0, 1.0), -200.0, rel_tol=1e-10)
        assert loggamma_logpdf(-1e6, 2.0, 3.0) < -1e6

    def test_normalized_by_quadrature(self):
        for alpha, beta in [(1.0, 1.0), (2.0, 0.5), (0.7, 3.0)]:
            integral, _ = quad(
                lambda x: math.exp(loggamma_logpdf(x, alpha, beta)), -60, 30
            )
            assert math.isclose(integral, 1.0, abs_tol=1e-3)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValueError):
            loggamma_logpdf(0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            loggamma_logpdf(0.0, 1.0, -2.0)


class TestLogGammaMix:
    def test_term_by_term_at_10_10(self):
        # far mixture halves underflow to zero density; near halves dominate
        value = loggamma_mix_loglike([10.0, 10.0])
        coord1 = math.log(0.5) + loggamma_logpdf(0.0, 1.0, 1.0)
        coord2 = math.log(0.5) - 0.5 * math.log(2 * math.pi)
        assert math.isclose(value, coord1 + coord2, rel_tol=1e-12)

    def test_four_modes_in_first_two_coordinates(self):
        modes = [(10.0, 10.0), (-10.0, 10.0), (10.0, -10.0), (-10.0, -10.0)]
        mode_values = [loggamma_mix_loglike(list(m)) for m in modes]
        saddle = loggamma_mix_loglike([0.0, 0.0])
        assert min(mode_values) > saddle + 5.0

    def test_factorizes_per_coordinate(self):
        def coord1(x):
            return 0.5 * math.exp(loggamma_logpdf(x - 10, 1, 1)) + 0.5 * math.exp(
                loggamma_logpdf(x + 10, 1, 1)
            )

        def coord2(x):
            normal = math.exp(-0.5 * (x - 10) ** 2) / math.sqrt(2 * math.pi)
            return 0.5 * normal + 0.5 * math.exp(loggamma_logpdf(x + 10, 1, 1))

        rng = np.random.default_rng(3)
        for _ in range(10):
            x, y = rng.uniform(-15, 15, size=2)
            assert math.isclose(
                loggamma_mix_loglike([x, y]),
                math.log(coord1(x)) + math.log(coord2(y)),
                rel_tol=1e-10,
            )

    def test_normalization_d2(self):
        # evidence on the box prior is 60^-d: each coordinate factor
        # integrates to 1 over [-30, 30] up to quadrature tolerance
        def coord1(x):
            return 0.5 * math.exp(loggamma_logpdf(x - 10, 1, 1)) + 0.5 * math.exp(
                loggamma_logpdf(x + 10, 1, 1)
            )

        def coord2(x):
            normal = math.exp(-0.5 * (x - 10) ** 2) / math.sqrt(2 * math.pi)
            return 0.5 * normal + 0.5 * math.exp(loggamma_logpdf(x + 10, 1, 1))

        i1 = quad(coord1, -30, 30, points=[-10, 10], limit=200)[0]
        i2 = quad(coord2, -30, 30, points=[-10, 10], limit=200)[0]
        log_evidence_box = math.log(i1) + math.log(i2) - 2 * math.log(60.0)
        assert math.isclose(log_evidence_box, true_logz(2), abs_tol=1e-3)

    def test_rejects_odd_dimension(self):
        with pytest.raises(ValueError):
            loggamma_mix_loglike([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            LikelihoodSpec("loggamma_mix", 3)

    def test_d10_splits_coordinates(self):
        # coordinates 3..6 (1-based) are LogGamma, 7..10 unit normal
        theta = np.zeros(10)
        base = loggamma_mix_loglike(theta)
        theta_lg = theta.copy()
        theta_lg[2] = -3.0  # LogGamma coordinate: log-density -3 - e^-3 at -3
        delta_lg = loggamma_mix_loglike(theta_lg) - base
        assert math.isclose(
            delta_lg, (-3.0 - math.exp(-3.0)) - (0.0 - 1.0), rel_tol=1e-10
        )
        theta_n = theta.copy()
        theta_n[9] = 2.0  # normal coordinate: quadratic in the offset
        delta_n = loggamma_mix_loglike(theta_n) - base
        assert math.isclose(delta_n, -2.0, rel_tol=1e-10)


class TestTrueLogZ:
    def test_d10_matches_reference(self):
        assert math.isclose(true_logz(10), -40.9434, abs_tol=5e-5)

    def test_d1(self):
        assert math.isclose(true_logz(1), -math.log(60.0), rel_tol=1e-15)

    def test_d2_doubles(self):
        assert math.isclose(true_logz(2), 2 * true_logz(1), rel_tol=1e-15)


class TestKernelScalarAgreement:
    def test_gaussian_matches_public(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            theta = rng.uniform(-30, 30, size=10)
            assert math.isclose(
                _kernels.gaussian_loglike_point(theta),
                gaussian_loglike(theta),
                rel_tol=1e-12,
            )

    def test_mix_matches_public(self):
        rng = np.random.default_rng(2)
        for d in (2, 4, 10):
            for _ in range(20):
                theta = rng.uniform(-30, 30, size=d)
                assert math.isclose(
                    _kernels.loggamma_mix_loglike_point(theta),
                    loggamma_mix_loglike(theta),
                    rel_tol=1e-12,
                )
