"""Bootstrap resampling of threads and weighted kernel density estimation.

A run with K threads is resampled by drawing exactly K threads uniformly
with replacement and merging them into a new run, which keeps the rate-K
Poisson-process interpretation of the prior-volume shrinkage.  Replication
``b`` of a batch always uses the stream for counter path ``(seed, b)``, so
batches are reproducible and parallelizable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .estimators import estimate
from .runs import NSRun, live_point_counts, logx_expected
from .seeding import rng_for

__all__ = [
    "BootstrapSample",
    "DensityCurve",
    "bootstrap_run",
    "bootstrap_values",
    "bootstrap_values_multi",
    "bootstrap_std",
    "weighted_kde",
    "kde_grid",
]

DEFAULT_REPLICATIONS = 200


@dataclass(frozen=True)
class BootstrapSample:
    """Estimator values over bootstrap replications of one run."""

    values: np.ndarray
    estimator: object
    run_id: str = None
    seed: int = None


@dataclass(frozen=True)
class DensityCurve:
    """A probability density evaluated on a grid."""

    grid: np.ndarray
    pdf: np.ndarray
    bandwidth: float


def _thread_indices(run):
    labels = run.thread_labels
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(run.n_threads + 1))
    return [order[bounds[t]:bounds[t + 1]] for t in range(run.n_threads)]


def _resampled_run(run, thr_idx, rng):
    k = len(thr_idx)
    draw = rng.integers(0, k, size=k)
    lengths = np.array([len(thr_idx[t]) for t in draw])
    idx = np.concatenate([thr_idx[t] for t in draw])
    labels = np.repeat(np.arange(k), lengths)
    order = np.argsort(idx, kind="stable")
    idx = idx[order]
    loglike = run.loglike[idx]
    birth = run.birth_loglike[idx]
    nlive = live_point_counts(loglike, birth)
    meta = {**run.meta, "bootstrap_of": run.meta.get("run_id")}
    return NSRun(run.params[idx], loglike, birth, nlive, labels[order], meta)


def bootstrap_run(run, seed):
    """Resample a run's threads with replacement into a new run.

    Live counts and thread labels are recomputed for the resampled point
    multiset; duplicated threads appear as exact duplicate points.
    """
    thr_idx = _thread_indices(run)
    if len(thr_idx) < 2:
        raise ValueError("bootstrap needs a run with at least 2 threads")
    return _resampled_run(run, thr_idx, rng_for(seed))


def bootstrap_values(run, spec, B, seed):
    """Estimator values over ``B`` bootstrap replications of a run."""
    matrix = bootstrap_values_multi(run, [spec], B, seed)
    return BootstrapSample(matrix[:, 0], spec, run.meta.get("run_id"), seed)


def bootstrap_values_multi(run, specs, B, seed):
    """Evaluate several estimators on shared bootstrap replications.

    Returns a ``(B, len(specs))`` array; column ``j`` equals
    ``bootstrap_values(run, specs[j], B, seed).values``, since the thread
    draw for replication ``b`` depends only on ``(seed, b)``.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    thr_idx = _thread_indices(run)
    if len(thr_idx) < 2:
        raise ValueError("bootstrap needs a run with at least 2 threads")
    out = np.empty((B, len(specs)))
    for b in range(B):
        rep = _resampled_run(run, thr_idx, rng_for(seed, b))
        logx = logx_expected(rep)
        for j, spec in enumerate(specs):
            out[b, j] = estimate(rep, logx, spec)
    return out


def bootstrap_std(sample):
    """Sample standard deviation (divisor B-1) of a bootstrap sample."""
    values = np.asarray(sample.values if hasattr(sample, "values") else sample)
    if len(values) < 2:
        raise ValueError("need at least 2 replications for a standard deviation")
    return float(np.std(values, ddof=1))


def _scott_bandwidth(samples, weights):
    """Scott's rule adapted to weights through the effective sample size."""
    wn = weights / weights.sum()
    mu = wn @ samples
    sigma = math.sqrt(float(wn @ (samples - mu) ** 2))
    n_eff = 1.0 / float(wn @ wn)
    h = sigma * n_eff ** (-0.2)
    if not h > 0.0 or not math.isfinite(h):
        h = 1.0
    return h


def weighted_kde(samples, weights, grid):
    """Gaussian-kernel density of weighted samples, evaluated on a grid.

    The weights enter the kernel sum directly; samples are never reduced to
    an evenly weighted subset, which would add spurious variation between
    bootstrap replications.  Bandwidth is Scott's rule with the effective
    sample size ``(sum w)^2 / sum w^2``.
    """
    samples = np.asarray(samples, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("empty samples")
    if np.any(weights < 0):
        raise ValueError("negative weights")
    if weights.sum() <= 0:
        raise ValueError("weights sum to zero")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted")
    h = _scott_bandwidth(samples, weights)
    wn = weights / weights.sum()
    pdf = np.zeros_like(grid)
    norm = 1.0 / (h * math.sqrt(2.0 * math.pi))
    chunk = max(1, (1 << 21) // max(1, len(grid)))
    for start in range(0, len(samples), chunk):
        s = samples[start:start + chunk]
        w = wn[start:start + chunk]
        z = (grid[:, None] - s[None, :]) / h
        pdf += (np.exp(-0.5 * z**2) * w[None, :]).sum(axis=1) * norm
    return DensityCurve(grid, pdf, h)


def kde_grid(samples, weights, n_grid=256, pad=4.0):
    """Default KDE grid: the weighted sample range padded by ``pad`` bandwidths."""
    samples = np.asarray(samples, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    h = _scott_bandwidth(samples, weights)
    return np.linspace(samples.min() - pad * h, samples.max() + pad * h, n_grid)
