"""Run generation: test likelihoods and the two bundled nested samplers.

Two likelihoods are provided on a uniform box prior with per-coordinate
bounds [-30, 30]: a unit isotropic Gaussian, and a heavy-tailed
LogGamma/Gaussian mixture with four well-separated modes in its first two
coordinates.  Both are normalized over the reals and carry negligible mass
outside the box, so the evidence on the box prior is ``60**-d``.

The perfect sampler exploits the Gaussian's spherical symmetry to sample
exactly within each likelihood constraint; it defines the
zero-implementation-effect baseline.  The slice sampler is deliberately
imperfect: its ``num_repeats`` knob controls how thoroughly each new point
is decorrelated from the live point it started at, so low values produce
the implementation-specific effects the diagnostics are built to detect.

The hot loops live in :mod:`nsdiag._kernels` (compiled when available).
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .runs import NSRun
from .seeding import rng_for, subseed

__all__ = [
    "BOX_HALF_WIDTH",
    "LikelihoodSpec",
    "SamplerSettings",
    "gaussian_loglike",
    "loggamma_logpdf",
    "loggamma_mix_loglike",
    "true_logz",
    "perfect_ns_gaussian",
    "slice_ns",
    "generate_runs",
]

BOX_HALF_WIDTH = 30.0

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LikelihoodSpec:
    """One of the bundled test likelihoods.

    ``kind`` is ``"gaussian"`` or ``"loggamma_mix"``; the mixture requires an
    even dimension of at least 2.
    """

    kind: str
    d: int

    def __post_init__(self):
        if self.kind not in ("gaussian", "loggamma_mix"):
            raise ValueError(f"unknown likelihood {self.kind!r}")
        if self.d < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "loggamma_mix" and (self.d < 2 or self.d % 2):
            raise ValueError("loggamma_mix requires even d >= 2")

    @property
    def kernel_id(self):
        return (
            _kernels.GAUSSIAN if self.kind == "gaussian" else _kernels.LOGGAMMA_MIX
        )

    def loglike(self, theta):
        if self.kind == "gaussian":
            return gaussian_loglike(theta)
        return loggamma_mix_loglike(theta)


@dataclass(frozen=True)
class SamplerSettings:
    """Knobs shared by the bundled samplers.

    ``num_repeats`` (slice sampler only) is the number of slice-sampling
    updates applied before accepting each new live point.
    """

    nlive: int
    num_repeats: int = 5
    termination_frac: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.nlive < 1:
            raise ValueError("nlive must be positive")
        if self.num_repeats < 1:
            raise ValueError("num_repeats must be positive")
        if not 0.0 < self.termination_frac < 1.0:
            raise ValueError("termination_frac must lie in (0, 1)")


def gaussian_loglike(theta):
    """Log-likelihood of the d-dimensional unit Gaussian at the origin.

    Accepts a single parameter vector or an ``(n, d)`` block; returns a
    scalar or a length-``n`` array accordingly.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise ValueError("non-finite parameter values")
    single = theta.ndim == 1
    theta = np.atleast_2d(theta)
    d = theta.shape[1]
    out = -0.5 * d * _LOG_2PI - 0.5 * np.sum(theta**2, axis=1)
    return float(out[0]) if single else out


def loggamma_logpdf(x, alpha, beta):
    """Log-density ``beta*x - exp(x)/alpha - beta*log(alpha) - lgamma(beta)``.

    The density of ``log(y)`` for ``y`` Gamma-distributed with shape ``beta``
    and scale ``alpha``.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        out = beta * x - np.exp(x) / alpha - beta * np.log(alpha) - gammaln(beta)
    return float(out) if out.ndim == 0 else out


def _lg11(x):
    with np.errstate(over="ignore"):
        return x - np.exp(x)


def _norm01(x):
    return -0.5 * _LOG_2PI - 0.5 * x**2


def loggamma_mix_loglike(theta):
    """Log-likelihood of the LogGamma/Gaussian mixture (even d).

    Per coordinate: the first is an equal LogGamma(1, 1) mixture translated
    to +-10; the second mixes a unit normal at +10 with a LogGamma at -10;
    coordinates 3..(d+2)/2 (1-based) are LogGamma and the rest unit normal.
    Mixtures are combined with log-sum-exp, so a far mode underflowing to
    zero density is handled exactly.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(theta)):
        raise ValueError("non-finite parameter values")
    single = theta.ndim == 1
    theta = np.atleast_2d(theta)
    d = theta.shape[1]
    if d < 2 or d % 2:
        raise ValueError("loggamma_mix requires even d >= 2")
    log_half = -math.log(2.0)
    out = log_half + np.logaddexp(_lg11(theta[:, 0] - 10.0), _lg11(theta[:, 0] + 10.0))
    out += log_half + np.logaddexp(
        _norm01(theta[:, 1] - 10.0), _lg11(theta[:, 1] + 10.0)
    )
    split = (d + 2) // 2
    for i in range(2, d):
        col = theta[:, i]
        out += _lg11(col) if i + 1 <= split else _norm01(col)
    return float(out[0]) if single else out


def true_logz(d):
    """Exact log-evidence of either test likelihood on the box prior."""
    if d < 1:
        raise ValueError("dimension must be positive")
    return -d * math.log(60.0)


def perfect_ns_gaussian(d, settings):
    """Run exact nested sampling on the d-dimensional Gaussian.

    Iso-likelihood contours are spheres, so replacement points can be drawn
    uniformly within the constraint without any approximation.  The final
    live points are appended to the run (live counts decrement over them).
    """
    rng = rng_for(settings.seed)
    params, logl, birth, ncall = _kernels.perfect_gaussian_points(
        rng, d, settings.nlive, math.log(settings.termination_frac), BOX_HALF_WIDTH
    )
    meta = _run_meta("gaussian", d, "perfect", settings, ncall)
    return NSRun.from_points(params, logl, birth, meta)


def slice_ns(likelihood, settings):
    """Run the slice-sampling nested sampler on a test likelihood.

    Each replacement point starts at a uniformly chosen surviving live point
    and receives ``settings.num_repeats`` univariate slice updates along
    random isotropic directions (stepping-out then shrinkage, against both
    the likelihood constraint and the prior box).

    Raises
    ------
    SliceBracketError
        If shrinkage fails to find an in-slice point within its step cap.
    """
    rng = rng_for(settings.seed)
    params, logl, birth, ncall = _kernels.slice_run_points(
        rng,
        likelihood.kernel_id,
        likelihood.d,
        settings.nlive,
        settings.num_repeats,
        math.log(settings.termination_frac),
        BOX_HALF_WIDTH,
    )
    meta = _run_meta(likelihood.kind, likelihood.d, "slice", settings, ncall)
    meta["num_repeats"] = settings.num_repeats
    return NSRun.from_points(params, logl, birth, meta)


def generate_runs(likelihood, settings, n_runs, seed, sampler=None):
    """Generate ``n_runs`` independent runs with per-run derived seeds.

    ``sampler`` is ``"perfect"`` or ``"slice"``; by default the Gaussian
    uses the perfect sampler and the mixture the slice sampler.  Run ``i``
    uses the seed derived from counter path ``(seed, i)``, so ensembles are
    reproducible no matter how generation is scheduled.
    """
    if sampler is None:
        sampler = "perfect" if likelihood.kind == "gaussian" else "slice"
    if sampler == "perfect" and likelihood.kind != "gaussian":
        raise ValueError("the perfect sampler only supports the Gaussian")
    runs = []
    for i in range(n_runs):
        run_settings = replace(settings, seed=subseed(seed, i))
        if sampler == "perfect":
            runs.append(perfect_ns_gaussian(likelihood.d, run_settings))
        elif sampler == "slice":
            runs.append(slice_ns(likelihood, run_settings))
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
    return runs


def _run_meta(kind, d, sampler, settings, ncall):
    return {
        "likelihood": kind,
        "dim": d,
        "sampler": sampler,
        "nlive": settings.nlive,
        "termination_frac": settings.termination_frac,
        "seed": settings.seed,
        "n_like_calls": ncall,
        "kernel_backend": _kernels.backend_name(),
    }
