"""Data behind the two diagnostic diagrams, plus CSV/SVG emission.

The first diagram shows the uncertainty of a posterior density estimate
under bootstrap resampling: per grid point, central quantile envelopes of
the kernel density values across replications.  The second places every
sample on the log prior-volume axis: the relative posterior mass curve,
per-function scatter of sampled values against log X, credible intervals of
the statistically estimated log X coordinates, and the traces of individual
threads.

Only data and simple vector graphics are produced here; styling is left to
downstream plotting tools.
"""

from dataclasses import dataclass

import numpy as np

from .estimators import importance_weights
from .resample import _resampled_run, _thread_indices, kde_grid, weighted_kde
from .runs import logx_expected, simulate_logx
from .seeding import rng_for, subseed

__all__ = [
    "LEVEL_MASSES",
    "ContourBand",
    "MassCurve",
    "RunLogXData",
    "LogXDiagram",
    "posterior_uncertainty_band",
    "posterior_mass_curve",
    "logx_diagram",
    "thread_trace",
    "write_band_csv",
    "write_logx_diagram_csv",
]

LEVEL_MASSES = (0.6827, 0.9545, 0.9973)


@dataclass(frozen=True)
class ContourBand:
    """Per-grid-point quantile envelopes of bootstrap density estimates.

    ``lower[k]`` and ``upper[k]`` bound the central ``level_masses[k]``
    probability mass of the replicated pdf values at each grid point; the
    bands are nested by construction.
    """

    grid: np.ndarray
    level_masses: tuple
    lower: np.ndarray
    upper: np.ndarray
    median: np.ndarray
    run_id: str = None


@dataclass(frozen=True)
class MassCurve:
    """Relative posterior mass L(X) X on a uniform log X grid, max 1.

    ``log_norm`` restores absolute scale: ``exp(log_norm) * mass`` is
    ``L(X) X``, whose integral over log X is the evidence.
    """

    logx: np.ndarray
    mass: np.ndarray
    log_norm: float


@dataclass(frozen=True)
class RunLogXData:
    """One run's contribution to the log X diagram.

    ``scatter`` maps function descriptors to ``(n, 3)`` arrays of
    ``(log X, f(theta), weight)`` rows in run order (log X descending);
    ``logx_quantiles`` has columns ``median, lo1, hi1, lo2, hi2, lo3, hi3``
    over the simulated log X coordinates of each point; ``traces`` is a
    list of ``(thread_index, polyline)`` pairs per traced thread.
    """

    run_id: str
    mass_curve: MassCurve
    scatter: dict
    logx_quantiles: np.ndarray
    traces: dict


@dataclass(frozen=True)
class LogXDiagram:
    """Log X diagram data for one or more runs sharing axes."""

    runs: list
    level_masses: tuple = LEVEL_MASSES


def posterior_uncertainty_band(run, f, grid=None, B=200, seed=0):
    """Bootstrap uncertainty envelopes of a weighted density estimate.

    Each replication resamples the run's threads, reweights, and evaluates
    a weighted KDE of ``f`` on the grid; the weights are used directly (no
    stochastic unweighting, which would inflate the spread).

    Parameters
    ----------
    run : NSRun
    f : ParamFunction
    grid : ndarray, optional
        Defaults to 256 points spanning the run's weighted ``f`` range
        padded by 4 bandwidths.
    B : int
        Number of replications, at least 10.
    seed : int
    """
    if B < 10:
        raise ValueError("need B >= 10 replications for quantile envelopes")
    fvals = f(run.params)
    weights = importance_weights(run, logx_expected(run))
    if grid is None:
        grid = kde_grid(fvals, weights)
    thr_idx = _thread_indices(run)
    if len(thr_idx) < 2:
        raise ValueError("bootstrap needs a run with at least 2 threads")
    pdfs = np.empty((B, len(grid)))
    for b in range(B):
        rep = _resampled_run(run, thr_idx, rng_for(seed, b))
        w = importance_weights(rep, logx_expected(rep))
        pdfs[b] = weighted_kde(f(rep.params), w, grid).pdf
    qs = [0.5]
    for mass in LEVEL_MASSES:
        qs += [(1.0 - mass) / 2.0, (1.0 + mass) / 2.0]
    quantiles = np.quantile(pdfs, qs, axis=0)
    return ContourBand(
        grid=np.asarray(grid, dtype=np.float64),
        level_masses=LEVEL_MASSES,
        lower=quantiles[1::2],
        upper=quantiles[2::2],
        median=quantiles[0],
        run_id=run.meta.get("run_id"),
    )


def posterior_mass_curve(run, n_grid=256):
    """Relative posterior mass against log X on a uniform grid.

    Evaluates ``L_i X_i`` at each dead point, normalizes the maximum to 1
    and resamples onto the grid by linear interpolation of the log mass.
    """
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    logx = logx_expected(run)
    log_mass = run.loglike + logx
    log_norm = float(np.max(log_mass))
    grid = np.linspace(logx[-1], logx[0], n_grid)
    rel = np.interp(grid, logx[::-1], (log_mass - log_norm)[::-1])
    return MassCurve(grid, np.exp(rel), log_norm)


def thread_trace(run, thread_index, f):
    """Polyline of one thread: (log X, f(theta)) pairs along the thread.

    The thread's points are placed at the parent run's expected log X
    coordinates (matched by likelihood), so traces overlay the scatter.
    """
    if not 0 <= thread_index < run.n_threads:
        raise IndexError(f"thread index {thread_index} out of range")
    idx = np.flatnonzero(run.thread_labels == thread_index)
    logx = logx_expected(run)
    return np.column_stack([logx[idx], f(run.params[idx])])


def logx_diagram(runs, fns, n_sim=200, traces_per_run=1, seed=0):
    """Assemble the log X diagram for one or more runs.

    Parameters
    ----------
    runs : NSRun or list of NSRun
    fns : list of ParamFunction
    n_sim : int
        Simulated log X draws per run for the credible intervals; at
        least 100.
    traces_per_run : int
        Number of randomly selected threads to trace per run.
    seed : int
    """
    if hasattr(runs, "loglike"):
        runs = [runs]
    if n_sim < 100:
        raise ValueError("need n_sim >= 100 for log X credible intervals")
    qs = [0.5]
    for mass in LEVEL_MASSES:
        qs += [(1.0 - mass) / 2.0, (1.0 + mass) / 2.0]
    entries = []
    for r, run in enumerate(runs):
        run_id = run.meta.get("run_id", f"run{r}")
        logx = logx_expected(run)
        weights = importance_weights(run, logx)
        scatter = {
            str(f): np.column_stack([logx, f(run.params), weights]) for f in fns
        }
        sims = simulate_logx(run, n_sim, subseed(seed, 0, r))
        logx_quantiles = np.quantile(sims, qs, axis=0).T
        rng = rng_for(seed, 1, r)
        n_traces = min(traces_per_run, run.n_threads)
        chosen = rng.choice(run.n_threads, size=n_traces, replace=False)
        traces = {int(t): {str(f): thread_trace(run, int(t), f) for f in fns}
                  for t in chosen}
        entries.append(
            RunLogXData(
                run_id=run_id,
                mass_curve=posterior_mass_curve(run),
                scatter=scatter,
                logx_quantiles=logx_quantiles,
                traces=traces,
            )
        )
    return LogXDiagram(entries)


def write_band_csv(band, path):
    """Write a contour band as CSV: grid, median and per-level envelopes."""
    from .io import atomic_write

    cols = ["x", "median"]
    for mass in band.level_masses:
        cols += [f"lo_{mass:g}", f"hi_{mass:g}"]
    lines = [",".join(cols)]
    for g in range(len(band.grid)):
        cells = [repr(float(band.grid[g])), repr(float(band.median[g]))]
        for k in range(len(band.level_masses)):
            cells += [repr(float(band.lower[k, g])), repr(float(band.upper[k, g]))]
        lines.append(",".join(cells))
    atomic_write(path, "\n".join(lines) + "\n")


def write_logx_diagram_csv(diagram, directory, prefix="logx"):
    """Write the log X diagram panels as CSV files.

    Emits ``<prefix>_mass.csv``, one ``<prefix>_scatter_<fn>.csv`` and
    ``<prefix>_traces_<fn>.csv`` per function, and
    ``<prefix>_logx_quantiles.csv``; every row is tagged with its run id.
    Returns the list of paths written.
    """
    import os

    from .io import atomic_write

    paths = []

    def emit(name, header, rows):
        path = os.path.join(directory, f"{prefix}_{name}.csv")
        atomic_write(path, "\n".join([header] + rows) + "\n")
        paths.append(path)

    rows = []
    for entry in diagram.runs:
        mc = entry.mass_curve
        rows += [
            f"{entry.run_id},{float(x)!r},{float(m)!r}"
            for x, m in zip(mc.logx, mc.mass)
        ]
    emit("mass", "run,logx,relative_mass", rows)

    fn_names = list(diagram.runs[0].scatter) if diagram.runs else []
    for name in fn_names:
        rows = []
        for entry in diagram.runs:
            rows += [
                f"{entry.run_id},{float(x)!r},{float(v)!r},{float(w)!r}"
                for x, v, w in entry.scatter[name]
            ]
        emit(f"scatter_{name}", "run,logx,value,weight", rows)
        rows = []
        for entry in diagram.runs:
            for t, polylines in entry.traces.items():
                rows += [
                    f"{entry.run_id},{t},{float(x)!r},{float(v)!r}"
                    for x, v in polylines[name]
                ]
        emit(f"traces_{name}", "run,thread,logx,value", rows)

    header = "run,point,median"
    for mass in diagram.level_masses:
        header += f",lo_{mass:g},hi_{mass:g}"
    rows = []
    for entry in diagram.runs:
        for i, q in enumerate(entry.logx_quantiles):
            rows.append(
                ",".join([entry.run_id, str(i)] + [repr(float(v)) for v in q])
            )
    emit("logx_quantiles", header, rows)
    return paths
