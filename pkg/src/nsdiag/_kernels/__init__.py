"""Run-generation kernels with a compiled core and a pure-Python fallback.

The compiled extension (``nsdiag._kernels._core``, built from Cython) is
used when importable; otherwise the pure-Python implementation in
:mod:`nsdiag._kernels.fallback` takes over.  Setting the environment
variable ``NSDIAG_PURE_PYTHON=1`` forces the fallback, which is handy for
benchmarking and debugging.

Both backends implement the same algorithms and the same randomness
contract (see the fallback module docstring) and agree in distribution;
each is exactly reproducible for a fixed seed.
"""

import os

from . import fallback

if os.environ.get("NSDIAG_PURE_PYTHON") == "1":
    _impl = fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = fallback

BACKEND = "compiled" if _impl is not fallback else "python"

GAUSSIAN = _impl.GAUSSIAN
LOGGAMMA_MIX = _impl.LOGGAMMA_MIX
gaussian_loglike_point = _impl.gaussian_loglike_point
loggamma_mix_loglike_point = _impl.loggamma_mix_loglike_point
perfect_gaussian_points = _impl.perfect_gaussian_points
slice_run_points = _impl.slice_run_points


def backend_name():
    """Which kernel implementation is active: ``"compiled"`` or ``"python"``."""
    return BACKEND
