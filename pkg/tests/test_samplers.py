import math

import numpy as np
import pytest

from nsdiag.estimators import log_evidence
from nsdiag.runs import decompose_threads, logx_expected, validate_run
from nsdiag.samplers import (
    LikelihoodSpec,
    SamplerSettings,
    generate_runs,
    perfect_ns_gaussian,
    slice_ns,
    true_logz,
)


class TestSettings:
    def test_validation(self):
        with pytest.raises(ValueError):
            SamplerSettings(nlive=0)
        with pytest.raises(ValueError):
            SamplerSettings(nlive=10, num_repeats=0)
        with pytest.raises(ValueError):
            SamplerSettings(nlive=10, termination_frac=1.5)


class TestPerfectSampler:
    def test_run_is_valid(self, gauss_run_small):
        assert validate_run(gauss_run_small) == []

    def test_threads_start_from_prior(self, gauss_run_small):
        threads = decompose_threads(gauss_run_small)
        assert len(threads) == 100
        assert all(t.entry_contour == -np.inf for t in threads)

    def test_final_counts_decrement(self, gauss_run_small):
        nlive = gauss_run_small.nlive
        assert nlive.max() == 100
        assert nlive[-100:].tolist() == list(range(100, 0, -1))

    def test_radii_strictly_decreasing(self, gauss_run_small):
        radii = np.sqrt(np.sum(gauss_run_small.params**2, axis=1))
        assert np.all(np.diff(radii) < 0)

    def test_same_seed_reproduces(self):
        settings = SamplerSettings(nlive=20, seed=5)
        a = perfect_ns_gaussian(2, settings)
        b = perfect_ns_gaussian(2, settings)
        assert np.array_equal(a.params, b.params)
        assert np.array_equal(a.loglike, b.loglike)

    def test_shrinkage_calibration(self, gauss_run_small):
        # in the ball-inside-box phase, -n log t should average 1 (Exp(1))
        run = gauss_run_small
        radii = np.sqrt(np.sum(run.params**2, axis=1))
        d = run.n_dims
        main = (run.nlive == 100) & (radii <= 30.0)
        idx = np.flatnonzero(main[:-1] & main[1:])
        log_t = d * (np.log(radii[idx + 1]) - np.log(radii[idx]))
        z = -100.0 * log_t
        se = z.std(ddof=1) / math.sqrt(len(z))
        assert len(z) > 300
        assert abs(z.mean() - 1.0) < 3 * se

    def test_evidence_unbiased_small(self):
        lk = LikelihoodSpec("gaussian", 2)
        runs = generate_runs(lk, SamplerSettings(nlive=60), 12, seed=99)
        logz = np.array([log_evidence(r, logx_expected(r)) for r in runs])
        se = logz.std(ddof=1) / math.sqrt(len(logz))
        assert abs(logz.mean() - true_logz(2)) < 3 * se

    def test_meta(self, gauss_run_small):
        meta = gauss_run_small.meta
        assert meta["likelihood"] == "gaussian"
        assert meta["sampler"] == "perfect"
        assert meta["nlive"] == 100
        assert meta["n_like_calls"] >= gauss_run_small.n_points


@pytest.fixture(scope="module")
def mix_run():
    lk = LikelihoodSpec("loggamma_mix", 2)
    return slice_ns(lk, SamplerSettings(nlive=60, num_repeats=10, seed=3))


class TestSliceSampler:
    def test_run_is_valid(self, mix_run):
        assert validate_run(mix_run) == []

    def test_constant_live_count(self, mix_run):
        assert mix_run.nlive.max() == 60
        assert mix_run.nlive[-60:].tolist() == list(range(60, 0, -1))

    def test_same_seed_reproduces(self):
        lk = LikelihoodSpec("gaussian", 2)
        settings = SamplerSettings(nlive=20, num_repeats=3, seed=8)
        a = slice_ns(lk, settings)
        b = slice_ns(lk, settings)
        assert np.array_equal(a.params, b.params)

    def test_finds_both_theta1_branches(self, mix_run):
        # the +-10 modes of the first coordinate should both be populated
        t1 = mix_run.params[:, 0]
        assert np.any(np.abs(t1 - 10) < 3)
        assert np.any(np.abs(t1 + 10) < 3)

    def test_gaussian_slice_consistent_with_perfect(self):
        # generous decorrelation reproduces the exact sampler's evidence
        lk = LikelihoodSpec("gaussian", 2)
        runs = generate_runs(
            lk, SamplerSettings(nlive=50, num_repeats=20), 8, seed=4, sampler="slice"
        )
        logz = np.array([log_evidence(r, logx_expected(r)) for r in runs])
        se = logz.std(ddof=1) / math.sqrt(len(logz))
        assert abs(logz.mean() - true_logz(2)) < 3.5 * se

    def test_meta_records_num_repeats(self, mix_run):
        assert mix_run.meta["num_repeats"] == 10
        assert mix_run.meta["sampler"] == "slice"


class TestGenerateRuns:
    def test_runs_differ_and_reproduce(self):
        lk = LikelihoodSpec("gaussian", 2)
        settings = SamplerSettings(nlive=15)
        runs_a = generate_runs(lk, settings, 3, seed=1)
        runs_b = generate_runs(lk, settings, 3, seed=1)
        assert not np.array_equal(runs_a[0].loglike, runs_a[1].loglike)
        for a, b in zip(runs_a, runs_b):
            assert np.array_equal(a.loglike, b.loglike)

    def test_perfect_requires_gaussian(self):
        lk = LikelihoodSpec("loggamma_mix", 2)
        with pytest.raises(ValueError):
            generate_runs(lk, SamplerSettings(nlive=10), 1, seed=0, sampler="perfect")
