"""Canonical representation of nested sampling runs.

A run is the ordered list of dead points together with the number of live
points present at each death.  Birth contours (the likelihood threshold each
point was sampled within) encode how the run decomposes into single live
point sub-runs, called threads, which are the unit of bootstrap resampling.

Arrays inside an :class:`NSRun` are frozen after construction, so runs can be
shared freely across parallel workers.
"""

import numpy as np
from dataclasses import dataclass, field

from .errors import BirthChainAmbiguous, BirthContourMissing

__all__ = [
    "SamplePoint",
    "NSRun",
    "Thread",
    "validate_run",
    "live_point_counts",
    "decompose_threads",
    "combine_runs",
    "logx_expected",
    "simulate_logx",
]


@dataclass(frozen=True)
class SamplePoint:
    """One dead point: parameters, log-likelihood and birth contour."""

    params: np.ndarray
    loglike: float
    birth_loglike: float


@dataclass(frozen=True, eq=False)
class NSRun:
    """A nested sampling run as parallel arrays sorted by log-likelihood.

    Parameters
    ----------
    params : ndarray, shape (n, d)
        Parameter vectors of the dead points.
    loglike : ndarray, shape (n,)
        Log-likelihoods, ascending.
    birth_loglike : ndarray, shape (n,)
        Contour each point was sampled within; ``-inf`` marks points drawn
        from the whole prior.
    nlive : ndarray of int, shape (n,)
        Number of live points present when each point died.
    thread_labels : ndarray of int, shape (n,)
        Thread index of each point, in ``[0, n_threads)``.
    meta : dict
        Run provenance (dimension, likelihood name, sampler settings, seed).
    """

    params: np.ndarray
    loglike: np.ndarray
    birth_loglike: np.ndarray
    nlive: np.ndarray
    thread_labels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", _frozen(self.params, np.float64, 2))
        object.__setattr__(self, "loglike", _frozen(self.loglike, np.float64, 1))
        object.__setattr__(
            self, "birth_loglike", _frozen(self.birth_loglike, np.float64, 1)
        )
        object.__setattr__(self, "nlive", _frozen(self.nlive, np.int64, 1))
        object.__setattr__(
            self, "thread_labels", _frozen(self.thread_labels, np.int64, 1)
        )
        n = len(self.loglike)
        if n == 0:
            raise ValueError("empty runs are not representable")
        for name in ("birth_loglike", "nlive", "thread_labels"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length differs from loglike length")
        if self.params.shape[0] != n:
            raise ValueError("params row count differs from loglike length")

    def __eq__(self, other):
        if not isinstance(other, NSRun):
            return NotImplemented
        return (
            np.array_equal(self.params, other.params)
            and np.array_equal(self.loglike, other.loglike)
            and np.array_equal(self.birth_loglike, other.birth_loglike)
            and np.array_equal(self.nlive, other.nlive)
            and np.array_equal(self.thread_labels, other.thread_labels)
            and self.meta == other.meta
        )

    @property
    def n_points(self):
        return len(self.loglike)

    @property
    def n_dims(self):
        return self.params.shape[1]

    @property
    def n_threads(self):
        return int(self.thread_labels.max()) + 1

    def point(self, i):
        """Return dead point ``i`` as a :class:`SamplePoint`."""
        return SamplePoint(
            self.params[i], float(self.loglike[i]), float(self.birth_loglike[i])
        )

    def points(self):
        """Iterate over the dead points as :class:`SamplePoint` objects."""
        return (self.point(i) for i in range(self.n_points))

    @classmethod
    def from_points(cls, params, loglike, birth_loglike, meta=None):
        """Build a run from unsorted dead points.

        Sorts by log-likelihood, reconstructs the live point counts from the
        birth contours and assigns thread labels by birth chaining.
        """
        params = np.asarray(params, dtype=np.float64)
        loglike = np.asarray(loglike, dtype=np.float64)
        birth_loglike = np.asarray(birth_loglike, dtype=np.float64)
        order = np.argsort(loglike, kind="stable")
        params, loglike, birth_loglike = params[order], loglike[order], birth_loglike[order]
        nlive = live_point_counts(loglike, birth_loglike)
        labels = _chain_labels(loglike, birth_loglike)
        return cls(params, loglike, birth_loglike, nlive, labels, dict(meta or {}))


@dataclass(frozen=True, eq=False)
class Thread(NSRun):
    """A single live point sub-run; ``nlive`` is identically one.

    The entry contour is the likelihood at which the thread began, ``-inf``
    for threads started from the whole prior.
    """

    @property
    def entry_contour(self):
        return float(self.birth_loglike[0])


def validate_run(run):
    """Check every :class:`NSRun` invariant.

    Returns
    -------
    list of str
        Empty iff the run is valid; each entry names the violated invariant
        and the offending index.  Exactly duplicated points (identical
        parameters, log-likelihood and birth) may share a log-likelihood:
        they arise from bootstrap resampling.  Distinct points may not.
    """
    violations = []
    logl, birth = run.loglike, run.birth_loglike
    n = run.n_points

    if not np.all(np.isfinite(logl)):
        for i in np.flatnonzero(~np.isfinite(logl)):
            violations.append(f"non-finite loglike at index {i}")
        return violations

    diffs = np.diff(logl)
    for i in np.flatnonzero(diffs < 0):
        violations.append(f"unsorted at index {i + 1}")
    for i in np.flatnonzero(diffs == 0):
        i = int(i)
        same = (
            np.array_equal(run.params[i], run.params[i + 1])
            and birth[i] == birth[i + 1]
        )
        if not same:
            violations.append(f"tied loglike between distinct points at index {i + 1}")

    for i in np.flatnonzero(~(logl > birth)):
        violations.append(f"birth >= loglike at index {i}")

    for i in np.flatnonzero(run.nlive < 1):
        violations.append(f"nlive < 1 at index {i}")

    if violations:
        return violations

    expected = live_point_counts(logl, birth)
    bad = np.flatnonzero(expected != run.nlive)
    if bad.size:
        violations.append(
            f"nlive inconsistent with birth contours at index {int(bad[0])}"
        )

    labels = run.thread_labels
    if labels.min() < 0:
        violations.append("negative thread label")
        return violations
    for t in range(int(labels.max()) + 1):
        idx = np.flatnonzero(labels == t)
        if idx.size == 0:
            violations.append(f"thread {t} has no points")
            continue
        chain_birth = birth[idx[1:]]
        chain_prev = logl[idx[:-1]]
        for k in np.flatnonzero(chain_birth != chain_prev):
            violations.append(
                f"broken birth chain in thread {t} at index {int(idx[k + 1])}"
            )
    return violations


def live_point_counts(loglike, birth_loglike):
    """Reconstruct the number of live points present at each death.

    ``count[i]`` is the number of points ``j`` with
    ``birth_loglike[j] < loglike[i] <= loglike[j]``, i.e. born strictly below
    contour ``i`` and still alive when point ``i`` died.  Points killed at
    tied log-likelihoods are treated as dying one at a time in array order.

    Parameters
    ----------
    loglike, birth_loglike : ndarray
        Sorted ascending by ``loglike``; the birth invariant must hold.

    Returns
    -------
    ndarray of int
    """
    loglike = np.asarray(loglike, dtype=np.float64)
    birth_loglike = np.asarray(birth_loglike, dtype=np.float64)
    if np.any(np.diff(loglike) < 0):
        raise ValueError("loglike must be sorted ascending")
    births = np.sort(birth_loglike)
    counts = np.searchsorted(births, loglike, side="left") - np.arange(len(loglike))
    return counts.astype(np.int64)


def decompose_threads(run):
    """Split a run into its single live point sub-runs.

    Each point's birth contour is matched to the earlier point whose
    log-likelihood it equals; ``-inf`` births open new threads.  When several
    identical contour values are available (duplicated points from
    resampling), claimants are assigned in array order.

    Returns
    -------
    list of Thread
        Threads partition the points; merging them back with
        :func:`combine_runs` reproduces the run.

    Raises
    ------
    BirthContourMissing
        If a birth contour matches no dead point's log-likelihood.
    BirthChainAmbiguous
        If more points claim a contour than points carry it.
    """
    labels = _chain_labels(run.loglike, run.birth_loglike)
    threads = []
    for t in range(int(labels.max()) + 1):
        idx = np.flatnonzero(labels == t)
        threads.append(
            Thread(
                run.params[idx],
                run.loglike[idx],
                run.birth_loglike[idx],
                np.ones(idx.size, dtype=np.int64),
                np.zeros(idx.size, dtype=np.int64),
                {**run.meta, "thread_of": run.meta.get("run_id"), "thread_index": t},
            )
        )
    return threads


def combine_runs(runs):
    """Merge several runs (or threads) into a single run.

    Points are pooled and re-sorted, live counts are recomputed from the
    union of birth contours, and thread labels are re-indexed so every
    source thread keeps its identity.

    Raises
    ------
    ValueError
        If the runs disagree on dimension or likelihood identity.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("need at least one run")
    d = runs[0].n_dims
    like = runs[0].meta.get("likelihood")
    for r in runs[1:]:
        if r.n_dims != d:
            raise ValueError(f"dimension mismatch: {r.n_dims} != {d}")
        other = r.meta.get("likelihood")
        if like is not None and other is not None and other != like:
            raise ValueError(f"likelihood mismatch: {other!r} != {like!r}")

    params = np.concatenate([r.params for r in runs])
    loglike = np.concatenate([r.loglike for r in runs])
    birth = np.concatenate([r.birth_loglike for r in runs])
    labels = []
    offset = 0
    for r in runs:
        labels.append(r.thread_labels + offset)
        offset += r.n_threads
    labels = np.concatenate(labels)

    order = np.argsort(loglike, kind="stable")
    loglike, birth = loglike[order], birth[order]
    nlive = live_point_counts(loglike, birth)
    meta = {**runs[0].meta, "combined_from": len(runs)}
    return NSRun(params[order], loglike, birth, nlive, labels[order], meta)


def logx_expected(run):
    """Expected log prior volume at each dead point.

    ``log X[i] = -sum_{k<=i} 1/nlive[k]``: the mean of ``log t`` under the
    rate-``n`` Poisson process shrinkage at each step.  Strictly decreasing
    for every valid run.
    """
    return -np.cumsum(1.0 / run.nlive)


def simulate_logx(run, n_sim, seed):
    """Draw joint samples of the log prior volumes of a run's dead points.

    Each row accumulates ``log t[k] = log(u[k]) / nlive[k]`` with ``u``
    uniform on (0, 1).  Row ``i`` uses the stream for counter path
    ``(seed, i)``, so the matrix is reproducible regardless of evaluation
    order.

    Returns
    -------
    ndarray, shape (n_sim, n_points)
    """
    if n_sim < 1:
        raise ValueError("n_sim must be >= 1")
    inv_n = 1.0 / run.nlive
    out = np.empty((n_sim, run.n_points))
    from .seeding import rng_for

    for i in range(n_sim):
        u = rng_for(seed, i).random(run.n_points)
        np.cumsum(np.log1p(-u) * inv_n, out=out[i])
    return out


def _frozen(arr, dtype, ndim):
    arr = np.array(arr, dtype=dtype, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d array, got {arr.ndim}-d")
    arr.flags.writeable = False
    return arr


def _chain_labels(loglike, birth_loglike):
    """Assign thread labels by greedy birth-contour chaining."""
    n = len(loglike)
    labels = np.empty(n, dtype=np.int64)
    open_tips = {}  # contour value -> list of thread ids whose tip carries it
    n_threads = 0
    for i in range(n):
        b = birth_loglike[i]
        if b == -np.inf:
            t = n_threads
            n_threads += 1
        else:
            tips = open_tips.get(b)
            if tips:
                t = tips.pop(0)
            else:
                matches = np.flatnonzero(loglike[:i] == b)
                if matches.size == 0:
                    exc = BirthContourMissing(
                        f"birth contour {b!r} of point {i} matches no dead point"
                    )
                else:
                    exc = BirthChainAmbiguous(
                        f"birth contour {b!r} of point {i} matches "
                        f"{matches.size} dead point(s), all already chained"
                    )
                exc.point_index = i
                raise exc
        labels[i] = t
        open_tips.setdefault(loglike[i], []).append(t)
    return labels
