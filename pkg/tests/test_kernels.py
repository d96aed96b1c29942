"""Backend selection and compiled/pure-Python kernel agreement."""

import math
import subprocess
import sys

import numpy as np
import pytest

from nsdiag import _kernels
from nsdiag._kernels import fallback
from nsdiag.errors import SliceBracketError
from nsdiag.seeding import rng_for

try:
    from nsdiag._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernels absent")

LOG_TERM = math.log(1e-3)


def test_active_backend_reported():
    assert _kernels.backend_name() in ("compiled", "python")


def test_env_var_forces_fallback():
    code = (
        "import nsdiag._kernels as k; print(k.backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"NSDIAG_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_fallback_deterministic():
    a = fallback.perfect_gaussian_points(rng_for(3), 2, 25, LOG_TERM)
    b = fallback.perfect_gaussian_points(rng_for(3), 2, 25, LOG_TERM)
    for x, y in zip(a[:3], b[:3]):
        assert np.array_equal(x, y)


def test_fallback_slice_deterministic():
    a = fallback.slice_run_points(rng_for(4), 1, 2, 25, 3, LOG_TERM)
    b = fallback.slice_run_points(rng_for(4), 1, 2, 25, 3, LOG_TERM)
    for x, y in zip(a[:3], b[:3]):
        assert np.array_equal(x, y)


@needs_compiled
class TestBackendAgreement:
    def test_scalar_likelihoods_match(self):
        rng = np.random.default_rng(0)
        for d in (2, 10):
            for _ in range(25):
                theta = rng.uniform(-30, 30, size=d)
                assert math.isclose(
                    _core.gaussian_loglike_point(theta),
                    fallback.gaussian_loglike_point(theta),
                    rel_tol=1e-12,
                )
                assert math.isclose(
                    _core.loggamma_mix_loglike_point(theta),
                    fallback.loggamma_mix_loglike_point(theta),
                    rel_tol=1e-12,
                )

    def test_perfect_runs_track_closely(self):
        # same seed: identical draw schema, so the runs agree step for step
        # until a last-ulp likelihood difference steers them apart
        a = _core.perfect_gaussian_points(rng_for(11), 4, 40, LOG_TERM)
        b = fallback.perfect_gaussian_points(rng_for(11), 4, 40, LOG_TERM)
        assert abs(len(a[1]) - len(b[1])) < 0.2 * len(a[1])
        n = min(len(a[1]), len(b[1]))
        assert np.allclose(a[1][:n], b[1][:n], rtol=1e-6, atol=1e-6)

    def test_slice_runs_statistically_equivalent(self):
        # pooled dead-point log-likelihoods from short ensembles agree
        from nsdiag.diagnostics import ks_statistic

        pools = []
        for impl in (_core, fallback):
            values = []
            for seed in range(6):
                out = impl.slice_run_points(rng_for(seed), 0, 2, 30, 5, LOG_TERM)
                values.append(out[1])
            pools.append(np.concatenate(values))
        assert ks_statistic(pools[0], pools[1]) < 0.05

    def test_dimension_cap_matches(self):
        with pytest.raises(ValueError):
            _core.slice_run_points(rng_for(0), 0, 65, 10, 1, LOG_TERM)
        with pytest.raises(ValueError):
            fallback.slice_run_points(rng_for(0), 0, 65, 10, 1, LOG_TERM)


def test_slice_bracket_error_is_reported():
    # a shrink cap of zero cannot ever accept a point
    with pytest.raises(SliceBracketError):
        fallback.slice_run_points(
            rng_for(1), 0, 2, 10, 1, LOG_TERM, max_expand=1, max_shrink=0
        )
