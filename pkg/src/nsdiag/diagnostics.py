"""Implementation-error estimators, thread consistency tests and reports.

Repeating a calculation and measuring the spread of results captures both
the intrinsic stochasticity of nested sampling and any additional
implementation-specific error the software introduced.  Bootstrap
resampling of threads captures the intrinsic part alone.  Assuming the two
are uncorrelated, their variances add, which gives the implementation error

    sigma_imp = sqrt(sigma_values^2 - sigma_bs^2)   (0 when negative)

and, when the true value is known, the same subtraction applied to the
root-mean-squared error.  When too few runs are available to estimate
sigma_values, pairs of runs can instead be compared through the
distributions of estimates computed from their constituent threads
(a two-sample KS test with valid p-values) or from bootstrap replications
(a KS statistical distance, which is *not* a p-value).

Caveat: threads are only exchangeable within a run if the sampler lets
live points migrate between modes.  Software that splits a run per mode
and evolves each independently breaks that assumption, and thread-based
p-values for such runs are not valid.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import estimate
from .resample import bootstrap_std, bootstrap_values_multi
from .runs import decompose_threads, logx_expected
from .seeding import rng_for, subseed

__all__ = [
    "ErrorBudget",
    "PairTestResult",
    "DiagnosticReport",
    "sigma_imp",
    "imp_fraction",
    "sigma_imp_rmse",
    "sigma_combined",
    "ks_statistic",
    "ks_pvalue",
    "thread_estimates",
    "thread_ks_test",
    "bootstrap_distance",
    "holm_bonferroni",
    "error_budget",
    "error_budgets",
    "pairwise_thread_tests",
    "pairwise_bootstrap_distances",
]

UNCERTAINTY_REPLICATIONS = 1000


def sigma_imp(sigma_values, sigma_bs):
    """Implementation-error standard deviation from the variance split.

    ``sqrt(sigma_values^2 - sigma_bs^2)`` when the observed spread exceeds
    the bootstrap estimate, else 0.
    """
    if sigma_values < 0 or sigma_bs < 0:
        raise ValueError("standard deviations must be non-negative")
    if sigma_values > sigma_bs:
        return math.sqrt(sigma_values**2 - sigma_bs**2)
    return 0.0


def imp_fraction(sigma_values, sigma_bs):
    """Fraction of the observed variation due to implementation effects."""
    if sigma_values <= 0:
        raise ValueError("sigma_values must be positive")
    return min(1.0, sigma_imp(sigma_values, sigma_bs) / sigma_values)


def sigma_imp_rmse(rmse, sigma_bs):
    """Implementation error via the RMSE against a known true value.

    Unlike the spread-based estimate this also captures systematic bias.
    """
    if rmse < 0 or sigma_bs < 0:
        raise ValueError("inputs must be non-negative")
    if rmse > sigma_bs:
        return math.sqrt(rmse**2 - sigma_bs**2)
    return 0.0


def sigma_combined(sigma_values, n_runs):
    """Approximate error of the combined inference from ``n_runs`` runs."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    return sigma_values / math.sqrt(n_runs)


def ks_statistic(a, b):
    """Exact two-sample KS statistic: sup |F_a - F_b| over pooled values."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_pvalue(statistic, n1, n2):
    """Asymptotic two-sample KS p-value, clamped into [0, 1].

    The raw expression ``2 exp(-2 n1 n2 D^2 / (n1 + n2))`` exceeds 1 for
    small statistics (it equals 2 at D = 0), so the result is clamped.
    """
    if not 0.0 <= statistic <= 1.0:
        raise ValueError("statistic must lie in [0, 1]")
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be >= 1")
    return min(1.0, 2.0 * math.exp(-2.0 * n1 * n2 * statistic**2 / (n1 + n2)))


@dataclass(frozen=True)
class PairTestResult:
    """Outcome of one pairwise run comparison for one estimator.

    ``p_value`` is present for thread tests and absent (None) for bootstrap
    statistical distances, which cannot be interpreted as p-values.
    """

    estimator: object
    ks_statistic: float
    p_value: float = None
    kind: str = "threads"
    run_ids: tuple = (None, None)


def thread_estimates(run, spec):
    """Estimator values computed from each constituent thread of a run.

    Each thread is treated as a rate-1 run, i.e. with expected log prior
    volumes -1, -2, ... at its points.
    """
    values = []
    for thread in decompose_threads(run):
        values.append(estimate(thread, logx_expected(thread), spec))
    return np.array(values)


def thread_ks_test(run1, run2, spec):
    """KS test between the two runs' per-thread estimator distributions.

    A p-value near zero means the threads of the two runs are statistically
    inconsistent, implying implementation-specific effects.
    """
    v1 = thread_estimates(run1, spec)
    v2 = thread_estimates(run2, spec)
    if v1.size < 2 or v2.size < 2:
        raise ValueError("thread KS test needs runs with >= 2 threads")
    d = ks_statistic(v1, v2)
    return PairTestResult(
        spec,
        d,
        ks_pvalue(d, v1.size, v2.size),
        "threads",
        (run1.meta.get("run_id"), run2.meta.get("run_id")),
    )


def bootstrap_distance(run1, run2, spec, B, seed):
    """KS distance between the runs' bootstrap estimator distributions.

    Both runs are resampled with the same seed, so comparing a run against
    itself gives a distance of exactly 0.  The value is a statistical
    distance in [0, 1], not a p-value: even perfect runs differ, so their
    bootstrap distributions need not coincide.
    """
    if B < 2:
        raise ValueError("bootstrap distance needs B >= 2")
    v1 = bootstrap_values_multi(run1, [spec], B, seed)[:, 0]
    v2 = bootstrap_values_multi(run2, [spec], B, seed)[:, 0]
    return PairTestResult(
        spec,
        ks_statistic(v1, v2),
        None,
        "bootstrap",
        (run1.meta.get("run_id"), run2.meta.get("run_id")),
    )


def holm_bonferroni(p_values, alpha):
    """Step-down multiple-testing correction.

    Sorts the p-values ascending and rejects the k-th smallest (1-based)
    while ``p <= alpha / (m - k + 1)``, stopping at the first failure.

    Returns
    -------
    ndarray of bool
        Rejection decisions in the input order.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    m = p.size
    reject = np.zeros(m, dtype=bool)
    for k, idx in enumerate(np.argsort(p, kind="stable")):
        if p[idx] <= alpha / (m - k):
            reject[idx] = True
        else:
            break
    return reject


@dataclass(frozen=True)
class ErrorBudget:
    """Error decomposition of one estimator over an ensemble of runs.

    Parenthesized-uncertainty fields (``*_unc``) come from bootstrapping
    over the set of runs.
    """

    estimator: object
    n_runs: int
    mean: float
    sigma_values: float
    sigma_bs: float
    sigma_imp: float
    imp_fraction: float
    true_value: float = None
    rmse: float = None
    sigma_imp_rmse: float = None
    imp_fraction_rmse: float = None
    mean_unc: float = None
    sigma_values_unc: float = None
    sigma_bs_unc: float = None
    sigma_imp_unc: float = None
    imp_fraction_unc: float = None
    rmse_unc: float = None
    sigma_imp_rmse_unc: float = None
    imp_fraction_rmse_unc: float = None
    run_estimates: np.ndarray = None
    run_bootstrap_stds: np.ndarray = None


def _budget_stats(est, bs_stds, true_value):
    """The Table-style statistics for one set of per-run results."""
    sv = float(np.std(est, ddof=1))
    sb = float(np.mean(bs_stds))
    si = sigma_imp(sv, sb)
    frac = imp_fraction(sv, sb) if sv > 0 else 0.0
    stats = [float(np.mean(est)), sv, sb, si, frac]
    if true_value is not None:
        rmse = float(np.sqrt(np.mean((est - true_value) ** 2)))
        sir = sigma_imp_rmse(rmse, sb)
        stats += [rmse, sir, min(1.0, sir / rmse) if rmse > 0 else 0.0]
    else:
        stats += [None, None, None]
    return stats


def error_budget(runs, spec, B=200, seed=0, true_value=None):
    """Error budget of one estimator over an ensemble of runs.

    ``sigma_values`` is the sample standard deviation of the per-run
    estimates; ``sigma_bs`` averages the per-run bootstrap standard
    deviations (run ``i`` uses the derived seed path ``(seed, 0, i)``).
    With a ``true_value`` the RMSE-based variants are included.
    Uncertainties are estimated by resampling the set of runs
    (:data:`UNCERTAINTY_REPLICATIONS` replications, seed path
    ``(seed, 1)``).
    """
    return error_budgets(runs, [spec], B, seed, [true_value])[0]


def error_budgets(runs, specs, B=200, seed=0, true_values=None):
    """Error budgets for several estimators, sharing bootstrap draws.

    Returns a list of :class:`ErrorBudget`, one per estimator.
    """
    runs = list(runs)
    if len(runs) < 2:
        raise ValueError("need at least 2 runs to measure the spread of results")
    if true_values is None:
        true_values = [None] * len(specs)
    est = np.empty((len(runs), len(specs)))
    bs_stds = np.empty((len(runs), len(specs)))
    for i, run in enumerate(runs):
        logx = logx_expected(run)
        values = bootstrap_values_multi(run, specs, B, subseed(seed, 0, i))
        for j, spec in enumerate(specs):
            est[i, j] = estimate(run, logx, spec)
            bs_stds[i, j] = bootstrap_std(values[:, j])

    rng = rng_for(seed, 1)
    n = len(runs)
    resamples = rng.integers(0, n, size=(UNCERTAINTY_REPLICATIONS, n))
    budgets = []
    for j, spec in enumerate(specs):
        stats = _budget_stats(est[:, j], bs_stds[:, j], true_values[j])
        boot = []
        for idx in resamples:
            if np.all(est[idx, j] == est[idx[0], j]):
                continue  # degenerate draw: no spread to measure
            boot.append(_budget_stats(est[idx, j], bs_stds[idx, j], true_values[j]))
        uncs = []
        for k, value in enumerate(stats):
            if value is None or len(boot) < 2:
                uncs.append(None)
            else:
                uncs.append(float(np.std([row[k] for row in boot], ddof=1)))
        budgets.append(
            ErrorBudget(
                estimator=spec,
                n_runs=n,
                mean=stats[0],
                sigma_values=stats[1],
                sigma_bs=stats[2],
                sigma_imp=stats[3],
                imp_fraction=stats[4],
                true_value=true_values[j],
                rmse=stats[5],
                sigma_imp_rmse=stats[6],
                imp_fraction_rmse=stats[7],
                mean_unc=uncs[0],
                sigma_values_unc=uncs[1],
                sigma_bs_unc=uncs[2],
                sigma_imp_unc=uncs[3],
                imp_fraction_unc=uncs[4],
                rmse_unc=uncs[5],
                sigma_imp_rmse_unc=uncs[6],
                imp_fraction_rmse_unc=uncs[7],
                run_estimates=est[:, j].copy(),
                run_bootstrap_stds=bs_stds[:, j].copy(),
            )
        )
    return budgets


def pairwise_thread_tests(runs, specs):
    """Thread KS tests over all run pairs, one result per pair and estimator.

    Per-run thread estimates are computed once and reused across pairs.
    """
    runs = list(runs)
    values = [[thread_estimates(run, spec) for run in runs] for spec in specs]
    results = []
    for j, spec in enumerate(specs):
        for a in range(len(runs)):
            for b in range(a + 1, len(runs)):
                v1, v2 = values[j][a], values[j][b]
                d = ks_statistic(v1, v2)
                results.append(
                    PairTestResult(
                        spec,
                        d,
                        ks_pvalue(d, v1.size, v2.size),
                        "threads",
                        (
                            runs[a].meta.get("run_id", a),
                            runs[b].meta.get("run_id", b),
                        ),
                    )
                )
    return results


def pairwise_bootstrap_distances(runs, specs, B=200, seed=0):
    """Bootstrap KS distances over all run pairs and estimators.

    Every run is resampled once with the shared seed, matching what
    :func:`bootstrap_distance` computes for each pair.
    """
    runs = list(runs)
    values = [bootstrap_values_multi(run, specs, B, seed) for run in runs]
    results = []
    for j, spec in enumerate(specs):
        for a in range(len(runs)):
            for b in range(a + 1, len(runs)):
                results.append(
                    PairTestResult(
                        spec,
                        ks_statistic(values[a][:, j], values[b][:, j]),
                        None,
                        "bootstrap",
                        (
                            runs[a].meta.get("run_id", a),
                            runs[b].meta.get("run_id", b),
                        ),
                    )
                )
    return results


@dataclass(frozen=True)
class DiagnosticReport:
    """Error budgets per estimator, plus optional pairwise test results."""

    budgets: list
    pair_results: list = field(default_factory=list)

    _ROWS = (
        ("True Value", "true_value", None),
        ("Mean Result", "mean", "mean_unc"),
        ("sigma_values", "sigma_values", "sigma_values_unc"),
        ("sigma_bs", "sigma_bs", "sigma_bs_unc"),
        ("sigma_imp", "sigma_imp", "sigma_imp_unc"),
        ("sigma_imp/sigma_values", "imp_fraction", "imp_fraction_unc"),
        ("Values RMSE", "rmse", "rmse_unc"),
        ("sigma_imp_RMSE", "sigma_imp_rmse", "sigma_imp_rmse_unc"),
        ("sigma_imp_RMSE/RMSE", "imp_fraction_rmse", "imp_fraction_rmse_unc"),
    )

    def to_table(self):
        """Column-aligned text table, one column per estimator."""
        headers = [""] + [str(b.estimator) for b in self.budgets]
        rows = [headers]
        for label, attr, unc_attr in self._ROWS:
            values = [getattr(b, attr) for b in self.budgets]
            if all(v is None for v in values):
                continue
            cells = [label]
            for b in self.budgets:
                v = getattr(b, attr)
                u = getattr(b, unc_attr) if unc_attr else None
                cells.append("" if v is None else format_uncertain(v, u))
            rows.append(cells)
        widths = [max(len(r[c]) for r in rows) for c in range(len(headers))]
        lines = [
            "  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows
        ]
        return "\n".join(lines)

    def to_csv(self):
        """Machine-readable CSV, one row per estimator."""
        cols = [
            "estimator", "n_runs", "mean", "mean_unc",
            "sigma_values", "sigma_values_unc", "sigma_bs", "sigma_bs_unc",
            "sigma_imp", "sigma_imp_unc", "imp_fraction", "imp_fraction_unc",
            "rmse", "rmse_unc", "sigma_imp_rmse", "sigma_imp_rmse_unc",
        ]
        lines = [",".join(cols)]
        for b in self.budgets:
            cells = [str(b.estimator), str(b.n_runs)]
            for attr in cols[2:]:
                v = getattr(b, attr)
                cells.append("" if v is None else repr(float(v)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def format_uncertain(value, unc):
    """Format ``value`` with its uncertainty as parenthesized final digits.

    Uncertainties are shown to one significant figure, or two when the
    leading digit is 1 (e.g. ``0.326(3)``, ``0.07(11)``).
    """
    if unc is None or not math.isfinite(unc) or unc <= 0:
        return f"{value:.4g}"
    exponent = math.floor(math.log10(unc))
    lead = round(unc / 10.0**exponent)
    if lead == 10:
        lead, exponent = 1, exponent + 1
    if lead == 1:
        digits = round(unc / 10.0 ** (exponent - 1))
        decimals = max(0, 1 - exponent)
    else:
        digits = lead
        decimals = max(0, -exponent)
    return f"{value:.{decimals}f}({digits})"
