"""Posterior point estimates from a run and its log X coordinates.

All evidence arithmetic happens in log space with a max shift, so runs whose
log-likelihoods span hundreds of nats stay finite.  Weighted medians and
credible levels use the smallest value at which the cumulative normalized
weight reaches the level, with points sorted by the estimated quantity; this
convention is deterministic and involves no interpolation.
"""

import numpy as np
from dataclasses import dataclass
from scipy.special import logsumexp

__all__ = [
    "ParamFunction",
    "EstimatorSpec",
    "parse_estimator",
    "importance_weights",
    "log_evidence",
    "estimate",
]

_QUANTITIES = ("logz", "mean", "median", "cred", "moment2")


@dataclass(frozen=True)
class ParamFunction:
    """A scalar function of the parameter vector.

    ``kind`` is ``"coord"`` (one coordinate, 0-based ``index``), ``"radial"``
    (the Euclidean norm), or ``"custom"`` with a callable mapping an
    ``(n, d)`` parameter block to ``n`` values.
    """

    kind: str
    index: int = 0
    fn: object = None
    descriptor: str = ""

    @classmethod
    def coordinate(cls, i):
        return cls("coord", index=i, descriptor=f"t{i + 1}")

    @classmethod
    def radial(cls):
        return cls("radial", descriptor="r")

    @classmethod
    def custom(cls, fn, descriptor="custom"):
        return cls("custom", fn=fn, descriptor=descriptor)

    @classmethod
    def parse(cls, text):
        """Parse the CLI form: ``t<k>`` (1-based coordinate) or ``r``."""
        if text == "r":
            return cls.radial()
        if text.startswith("t") and text[1:].isdigit() and int(text[1:]) >= 1:
            return cls.coordinate(int(text[1:]) - 1)
        raise ValueError(f"unknown parameter function {text!r}")

    def __call__(self, params):
        params = np.atleast_2d(params)
        if self.kind == "coord":
            if self.index >= params.shape[1]:
                raise ValueError(
                    f"coordinate {self.index} out of range for d={params.shape[1]}"
                )
            return params[:, self.index]
        if self.kind == "radial":
            return np.sqrt(np.sum(params**2, axis=1))
        return np.asarray(self.fn(params), dtype=np.float64)

    def __str__(self):
        return self.descriptor


@dataclass(frozen=True)
class EstimatorSpec:
    """Declarative description of a scalar posterior quantity.

    ``quantity`` is one of ``logz``, ``mean``, ``median``, ``cred`` or
    ``moment2``; all but ``logz`` act on a :class:`ParamFunction`, and
    ``cred`` additionally takes a level in (0, 1).
    """

    quantity: str
    fn: ParamFunction = None
    level: float = None

    def __post_init__(self):
        if self.quantity not in _QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.quantity == "logz":
            if self.fn is not None:
                raise ValueError("logz takes no parameter function")
        elif self.fn is None:
            raise ValueError(f"{self.quantity} requires a parameter function")
        if (self.level is not None) != (self.quantity == "cred"):
            raise ValueError("level is present iff quantity is cred")
        if self.level is not None and not 0.0 < self.level < 1.0:
            raise ValueError("credible level must lie in (0, 1)")

    def __str__(self):
        if self.quantity == "logz":
            return "logz"
        if self.quantity == "cred":
            return f"cred:{self.fn}:{self.level:g}"
        return f"{self.quantity}:{self.fn}"


def parse_estimator(text):
    """Parse the canonical string form of an :class:`EstimatorSpec`.

    Examples: ``logz``, ``mean:t1``, ``median:r``, ``cred:t2:0.84``,
    ``moment2:t1``.
    """
    parts = text.split(":")
    if parts[0] == "logz":
        if len(parts) != 1:
            raise ValueError(f"logz takes no arguments: {text!r}")
        return EstimatorSpec("logz")
    if parts[0] in ("mean", "median", "moment2"):
        if len(parts) != 2:
            raise ValueError(f"malformed estimator {text!r}")
        return EstimatorSpec(parts[0], ParamFunction.parse(parts[1]))
    if parts[0] == "cred":
        if len(parts) != 3:
            raise ValueError(f"malformed estimator {text!r}")
        return EstimatorSpec("cred", ParamFunction.parse(parts[1]), float(parts[2]))
    raise ValueError(f"unknown estimator {text!r}")


def _log_dx(logx):
    """Log of the prior volume slabs X[i-1] - X[i], with X[0-] = 1."""
    logx = np.asarray(logx, dtype=np.float64)
    if np.any(np.diff(logx) >= 0) or logx[0] >= 0:
        raise ValueError("logx must be strictly decreasing and negative")
    prev = np.concatenate(([0.0], logx[:-1]))
    return prev + np.log1p(-np.exp(logx - prev))


def importance_weights(run, logx):
    """Normalized posterior weights ``w[i] ∝ L[i] (X[i-1] - X[i])``.

    Computed in log space; the result is finite and sums to one.
    """
    if not np.all(np.isfinite(run.loglike)):
        raise ValueError("non-finite loglike")
    logw = run.loglike + _log_dx(logx)
    return np.exp(logw - logsumexp(logw))


def log_evidence(run, logx):
    """Log of the evidence quadrature ``sum_i L[i] (X[i-1] - X[i])``."""
    if not np.all(np.isfinite(run.loglike)):
        raise ValueError("non-finite loglike")
    return float(logsumexp(run.loglike + _log_dx(logx)))


def estimate(run, logx, spec):
    """Evaluate one scalar posterior estimator on a run.

    ``mean`` and ``moment2`` are weighted first and second moments of the
    parameter function; ``median`` and ``cred`` read the weighted empirical
    CDF.  ``logz`` delegates to :func:`log_evidence`.
    """
    if spec.quantity == "logz":
        return log_evidence(run, logx)
    w = importance_weights(run, logx)
    f = spec.fn(run.params)
    if spec.quantity == "mean":
        return float(w @ f)
    if spec.quantity == "moment2":
        return float(w @ f**2)
    level = 0.5 if spec.quantity == "median" else spec.level
    return weighted_quantile(f, w, level)


def weighted_quantile(values, weights, level):
    """Smallest value whose cumulative normalized weight reaches ``level``."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    cum /= cum[-1]
    k = np.searchsorted(cum, level, side="left")
    k = min(int(k), len(values) - 1)
    return float(values[order[k]])
