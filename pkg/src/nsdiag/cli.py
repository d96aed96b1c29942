"""Command-line interface.

Subcommands
-----------
``simulate``
    Generate an ensemble of nested sampling runs into a directory.
``check``
    Error budgets (observed spread, bootstrap error, implementation error)
    for a set of runs, as a table plus optional CSV.
``compare``
    Pairwise thread KS tests and bootstrap distances over a set of runs,
    with a Holm-Bonferroni summary of the thread p-values.
``plot``
    Posterior-uncertainty bands and the log X diagram as CSV (and SVG).

Every subcommand takes ``--seed`` and produces byte-identical artifacts for
identical invocations.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import io, plotdata, svg
from .diagnostics import (
    DiagnosticReport,
    error_budgets,
    holm_bonferroni,
    pairwise_bootstrap_distances,
    pairwise_thread_tests,
)
from .estimators import ParamFunction, parse_estimator
from .samplers import LikelihoodSpec, SamplerSettings, perfect_ns_gaussian, slice_ns
from .seeding import subseed

_CONFIG_KEYS = {
    "likelihood": str,
    "dim": int,
    "nlive": int,
    "num_repeats": int,
    "termination_frac": float,
    "seed": int,
    "runs": int,
    "out_dir": str,
    "sampler": str,
}


def read_config(path):
    """Parse a plain-text ``key=value`` settings file."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_KEYS[key](raw.strip())
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nsdiag", description="nested sampling diagnostics"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate an ensemble of runs")
    p.add_argument("--config", help="key=value settings file (flags win)")
    p.add_argument("--likelihood", choices=["gaussian", "loggamma_mix"])
    p.add_argument("--dim", type=int)
    p.add_argument("--nlive", type=int)
    p.add_argument("--num-repeats", type=int, dest="num_repeats")
    p.add_argument("--termination-frac", type=float, dest="termination_frac")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="out_dir")
    p.add_argument(
        "--sampler",
        choices=["auto", "perfect", "slice"],
        help="default: perfect for gaussian, slice otherwise",
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = sub.add_parser("check", help="error budgets over a run set")
    p.add_argument("files", nargs="+")
    p.add_argument("--estimators", default="logz,mean:t1")
    p.add_argument("--bootstraps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--true-logz", type=float, dest="true_logz")
    p.add_argument("--csv", help="also write the report as CSV")

    p = sub.add_parser("compare", help="pairwise consistency tests")
    p.add_argument("files", nargs="+")
    p.add_argument("--estimators", default="logz,mean:t1")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--bootstraps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also write the results as CSV")

    p = sub.add_parser("plot", help="diagnostic diagram data (CSV/SVG)")
    p.add_argument("files", nargs="+")
    p.add_argument("--functions", default="t1", help="comma list, e.g. t1,t2,r")
    p.add_argument("--out", required=True)
    p.add_argument("--bootstraps", type=int, default=200)
    p.add_argument("--n-sim", type=int, default=200, dest="n_sim")
    p.add_argument("--traces", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", action="store_true")
    return parser


def _cmd_simulate(args):
    config = read_config(args.config) if args.config else {}
    merged = dict(config)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    missing = [k for k in ("likelihood", "dim", "nlive", "runs", "out_dir") if k not in merged]
    if missing:
        raise SystemExit(f"missing settings: {', '.join(missing)}")
    likelihood = LikelihoodSpec(merged["likelihood"], merged["dim"])
    sampler = merged.get("sampler", "auto")
    if sampler == "auto" or sampler is None:
        sampler = "perfect" if likelihood.kind == "gaussian" else "slice"
    if sampler == "perfect" and likelihood.kind != "gaussian":
        raise SystemExit("the perfect sampler only supports the Gaussian")
    settings = SamplerSettings(
        nlive=merged["nlive"],
        num_repeats=merged.get("num_repeats", 5),
        termination_frac=merged.get("termination_frac", 1e-3),
    )
    seed = merged.get("seed", 0)
    os.makedirs(merged["out_dir"], exist_ok=True)

    def generate(index):
        run_settings = replace(settings, seed=subseed(seed, index))
        if sampler == "perfect":
            run = perfect_ns_gaussian(likelihood.d, run_settings)
        else:
            run = slice_ns(likelihood, run_settings)
        path = os.path.join(merged["out_dir"], f"run_{index:04d}.run")
        io.save_run(run, path)
        return path

    indices = range(merged["runs"])
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            tasks = [
                (likelihood.kind, likelihood.d, sampler, settings, seed, i,
                 merged["out_dir"])
                for i in indices
            ]
            paths = list(pool.map(_simulate_worker, tasks))
    else:
        paths = [generate(i) for i in indices]
    for path in paths:
        print(path)
    return 0


def _simulate_worker(task):
    kind, d, sampler, settings, seed, index, out_dir = task
    run_settings = replace(settings, seed=subseed(seed, index))
    if sampler == "perfect":
        run = perfect_ns_gaussian(d, run_settings)
    else:
        run = slice_ns(LikelihoodSpec(kind, d), run_settings)
    path = os.path.join(out_dir, f"run_{index:04d}.run")
    io.save_run(run, path)
    return path


def _load_runs(paths):
    return [io.load_run(path) for path in paths]


def _cmd_check(args):
    runs = _load_runs(args.files)
    specs = [parse_estimator(s) for s in args.estimators.split(",")]
    true_values = [
        args.true_logz
        if spec.quantity == "logz" and args.true_logz is not None
        else None
        for spec in specs
    ]
    budgets = error_budgets(
        runs, specs, B=args.bootstraps, seed=args.seed, true_values=true_values
    )
    report = DiagnosticReport(budgets)
    print(report.to_table())
    if args.csv:
        io.atomic_write(args.csv, report.to_csv())
    return 0


def _cmd_compare(args):
    runs = _load_runs(args.files)
    if len(runs) < 2:
        raise SystemExit("compare needs at least two run files")
    specs = [parse_estimator(s) for s in args.estimators.split(",")]
    thread_results = pairwise_thread_tests(runs, specs)
    distances = pairwise_bootstrap_distances(
        runs, specs, B=args.bootstraps, seed=args.seed
    )
    p_values = [r.p_value for r in thread_results]
    verdicts = holm_bonferroni(p_values, args.alpha)

    header = ["run_1", "run_2", "estimator", "thread_D", "thread_p",
              "bs_distance", "holm_reject"]
    rows = []
    for t, d, rej in zip(thread_results, distances, verdicts):
        rows.append([
            str(t.run_ids[0]), str(t.run_ids[1]), str(t.estimator),
            f"{t.ks_statistic:.4f}", f"{t.p_value:.4g}",
            f"{d.ks_statistic:.4f}", "reject" if rej else "accept",
        ])
    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
    for row in [header] + rows:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    n_rej = int(verdicts.sum())
    print(
        f"Holm-Bonferroni: rejected {n_rej} of {len(verdicts)} "
        f"thread-consistency hypotheses at alpha={args.alpha:g}"
    )
    if args.csv:
        lines = [",".join(header)]
        lines += [",".join(row) for row in rows]
        io.atomic_write(args.csv, "\n".join(lines) + "\n")
    return 0


def _cmd_plot(args):
    runs = _load_runs(args.files)
    fns = [ParamFunction.parse(s) for s in args.functions.split(",")]
    os.makedirs(args.out, exist_ok=True)
    written = []

    for f in fns:
        bands = []
        for r, run in enumerate(runs):
            band = plotdata.posterior_uncertainty_band(
                run, f, B=args.bootstraps, seed=subseed(args.seed, 0, r)
            )
            path = os.path.join(args.out, f"band_{f}_{band.run_id or r}.csv")
            plotdata.write_band_csv(band, path)
            written.append(path)
            bands.append(band)
        if args.svg:
            path = os.path.join(args.out, f"band_{f}.svg")
            svg.band_svg(bands, path, label=str(f))
            written.append(path)

    diagram = plotdata.logx_diagram(
        runs, fns, n_sim=args.n_sim, traces_per_run=args.traces,
        seed=subseed(args.seed, 1),
    )
    written += plotdata.write_logx_diagram_csv(diagram, args.out)
    if args.svg:
        path = os.path.join(args.out, "logx_diagram.svg")
        svg.logx_diagram_svg(diagram, path)
        written.append(path)
    for path in written:
        print(path)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "check": _cmd_check,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except (OSError, ValueError, KeyError) as exc:
        print(f"nsdiag: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
