import math

import numpy as np
import pytest

from nsdiag.estimators import (
    EstimatorSpec,
    ParamFunction,
    estimate,
    importance_weights,
    log_evidence,
    parse_estimator,
    weighted_quantile,
)
from nsdiag.runs import NSRun


def run_with(loglike, params=None):
    loglike = np.asarray(loglike, dtype=np.float64)
    n = len(loglike)
    if params is None:
        params = np.zeros((n, 1))
    birth = np.full(n, -np.inf)
    return NSRun(params, loglike, birth, np.arange(n, 0, -1), np.arange(n))


class TestImportanceWeights:
    def test_equal_likelihood_halving_volumes(self):
        run = run_with([0.5, 0.5 + 1e-12])  # effectively equal loglikes
        logx = np.log([0.5, 0.25])
        w = importance_weights(run, logx)
        assert np.allclose(w, [2 / 3, 1 / 3], atol=1e-9)

    def test_single_point(self):
        run = run_with([3.0])
        assert np.allclose(importance_weights(run, np.log([0.5])), [1.0])

    def test_nonfinite_loglike_rejected(self):
        run = run_with([0.0, np.inf])
        with pytest.raises(ValueError):
            importance_weights(run, np.log([0.5, 0.25]))

    def test_non_monotonic_logx_rejected(self):
        run = run_with([1.0, 2.0])
        with pytest.raises(ValueError):
            importance_weights(run, np.log([0.25, 0.5]))

    def test_sum_to_one_and_shift_invariant(self):
        rng = np.random.default_rng(0)
        loglike = np.sort(rng.normal(size=40))
        logx = -np.cumsum(rng.random(40) * 0.2 + 0.01)
        w1 = importance_weights(run_with(loglike), logx)
        w2 = importance_weights(run_with(loglike + 123.4), logx)
        assert math.isclose(w1.sum(), 1.0, rel_tol=1e-12)
        assert np.allclose(w1, w2)

    def test_huge_loglikes_stay_finite(self):
        w = importance_weights(run_with([900.0, 1000.0]), np.log([0.5, 0.25]))
        assert np.all(np.isfinite(w))


class TestLogEvidence:
    def test_single_unit_slab(self):
        # one point, loglike 0, covering the whole prior volume
        run = run_with([0.0])
        assert abs(log_evidence(run, np.array([-50.0]))) < 1e-12

    def test_two_slab_quadrature(self):
        run = run_with([np.log(2.0), np.log(4.0)])
        logx = np.log([0.5, 1e-300])  # slabs of 0.5 and ~0.5
        assert math.isclose(log_evidence(run, logx), math.log(3.0), rel_tol=1e-9)

    def test_shifts_with_loglike_offset(self):
        rng = np.random.default_rng(1)
        loglike = np.sort(rng.normal(size=30))
        logx = -np.cumsum(rng.random(30) * 0.3 + 0.01)
        base = log_evidence(run_with(loglike), logx)
        shifted = log_evidence(run_with(loglike + 7.5), logx)
        assert math.isclose(shifted, base + 7.5, rel_tol=1e-12)


class TestEstimate:
    def test_weighted_mean(self):
        run = run_with([0.5, 0.5 + 1e-12], params=np.array([[1.0], [3.0]]))
        logx = np.log([0.75, 1e-300])  # volume slabs 0.25 and 0.75
        spec = parse_estimator("mean:t1")
        value = estimate(run, logx, spec)
        assert math.isclose(value, 0.25 * 1 + 0.75 * 3, rel_tol=1e-9)

    def test_weighted_median_crosses_in_second_point(self):
        f = np.array([1.0, 3.0])
        w = np.array([0.25, 0.75])
        assert weighted_quantile(f, w, 0.5) == 3.0

    def test_radial_three_four_five(self):
        run = run_with([1.0], params=np.array([[3.0, 4.0]]))
        value = estimate(run, np.array([-1.0]), parse_estimator("mean:r"))
        assert math.isclose(value, 5.0, rel_tol=1e-12)

    def test_moment2(self):
        run = run_with([0.5, 0.5 + 1e-12], params=np.array([[1.0], [3.0]]))
        logx = np.log([0.75, 1e-300])
        value = estimate(run, logx, parse_estimator("moment2:t1"))
        assert math.isclose(value, 0.25 * 1 + 0.75 * 9, rel_tol=1e-9)

    def test_mean_invariant_under_permutation(self):
        rng = np.random.default_rng(2)
        loglike = np.sort(rng.normal(size=25))
        params = rng.normal(size=(25, 2))
        logx = -np.cumsum(rng.random(25) * 0.2 + 0.05)
        run = run_with(loglike, params)
        spec = parse_estimator("mean:t2")
        base = estimate(run, logx, spec)
        # permuting points together with their weights changes nothing
        perm = rng.permutation(25)
        w = importance_weights(run, logx)
        assert math.isclose(base, float(w[perm] @ params[perm, 1]), rel_tol=1e-12)

    def test_dominant_weight_returns_that_point(self):
        run = run_with([0.0, 800.0], params=np.array([[5.0], [9.0]]))
        logx = np.log([0.5, 0.25])
        for text in ("mean:t1", "median:t1", "cred:t1:0.9", "moment2:t1"):
            value = estimate(run, logx, parse_estimator(text))
            expected = 81.0 if text.startswith("moment2") else 9.0
            assert math.isclose(value, expected, rel_tol=1e-9)

    def test_coordinate_out_of_range(self):
        run = run_with([1.0], params=np.array([[3.0, 4.0]]))
        with pytest.raises(ValueError, match="out of range"):
            estimate(run, np.array([-1.0]), parse_estimator("mean:t3"))


class TestSpecParsing:
    @pytest.mark.parametrize(
        "text", ["logz", "mean:t1", "median:r", "cred:t2:0.84", "moment2:t1"]
    )
    def test_roundtrip(self, text):
        assert str(parse_estimator(text)) == text

    @pytest.mark.parametrize(
        "text", ["logz:t1", "mean", "cred:t1", "cred:t1:1.5", "mean:x1", "mode:t1"]
    )
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_estimator(text)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            EstimatorSpec("mean")
        with pytest.raises(ValueError):
            EstimatorSpec("logz", ParamFunction.radial())
        with pytest.raises(ValueError):
            EstimatorSpec("mean", ParamFunction.radial(), level=0.5)

    def test_custom_function(self):
        f = ParamFunction.custom(lambda p: p[:, 0] * 2.0, "double")
        assert np.allclose(f(np.array([[1.0], [2.0]])), [2.0, 4.0])
