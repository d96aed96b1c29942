"""Pure-Python run-generation kernels.

These mirror the compiled kernels in ``nsdiag._kernels._core`` and are used
when the extension is unavailable (or forced via ``NSDIAG_PURE_PYTHON=1``).
Within a backend, results are exactly reproducible for a fixed seed; across
backends they agree in distribution (floating-point evaluation details may
differ in the last bits, which can steer individual trajectories apart).

Randomness contract (identical in both backends)
------------------------------------------------
All draws come from one PCG64 stream:

* uniforms are single ``next_double`` draws in [0, 1);
* standard normals are Box-Muller pairs on ``(1 - u1, u2)``, consuming two
  uniforms per pair, with the trailing normal discarded for odd counts;
* bounded integers in ``[0, m)`` are ``floor(u * m)`` clipped to ``m - 1``.

Run generation draws, in order: the initial live points (point-major,
coordinate-minor box uniforms), then per replacement whatever the sampler
needs (ball direction/radius or slice-chain draws).
"""

import math

import numpy as np

from ..errors import SliceBracketError

GAUSSIAN = 0
LOGGAMMA_MIX = 1

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_HALF = -math.log(2.0)


def _normals(rng, n):
    """n standard normals via Box-Muller pairs."""
    out = np.empty(n)
    for k in range(0, n, 2):
        u1 = rng.random()
        u2 = rng.random()
        r = math.sqrt(-2.0 * math.log1p(-u1))
        a = 2.0 * math.pi * u2
        out[k] = r * math.cos(a)
        if k + 1 < n:
            out[k + 1] = r * math.sin(a)
    return out


def _bounded_int(rng, m):
    k = int(rng.random() * m)
    return m - 1 if k >= m else k


def _logaddexp(a, b):
    if a < b:
        a, b = b, a
    if a == -math.inf:
        return -math.inf
    return a + math.log1p(math.exp(b - a))


def _lg11(t):
    """Log-density of LogGamma with unit shape and scale: t - e^t."""
    return t - math.exp(t)


def _norm01(t):
    return -0.5 * _LOG_2PI - 0.5 * t * t


def gaussian_loglike_point(x):
    """Unit isotropic Gaussian log-density at one point."""
    x = np.asarray(x)
    return -0.5 * len(x) * _LOG_2PI - 0.5 * float(x @ x)


def loggamma_mix_loglike_point(x):
    """LogGamma/Gaussian mixture log-density at one point (d even)."""
    x = np.asarray(x)
    d = len(x)
    total = _LOG_HALF + _logaddexp(_lg11(x[0] - 10.0), _lg11(x[0] + 10.0))
    total += _LOG_HALF + _logaddexp(_norm01(x[1] - 10.0), _lg11(x[1] + 10.0))
    split = (d + 2) // 2
    for i in range(2, d):
        t = float(x[i])
        total += _lg11(t) if i + 1 <= split else _norm01(t)
    return total


def _loglike(like_id, x):
    if like_id == GAUSSIAN:
        return gaussian_loglike_point(x)
    return loggamma_mix_loglike_point(x)


class _DeadBuffer:
    """Growable storage for dead points."""

    def __init__(self, d, capacity):
        self.params = np.empty((capacity, d))
        self.loglike = np.empty(capacity)
        self.birth = np.empty(capacity)
        self.n = 0

    def append(self, x, logl, birth):
        if self.n == len(self.loglike):
            grow = len(self.loglike)
            self.params = np.concatenate([self.params, np.empty_like(self.params)])
            self.loglike = np.concatenate([self.loglike, np.empty(grow)])
            self.birth = np.concatenate([self.birth, np.empty(grow)])
        self.params[self.n] = x
        self.loglike[self.n] = logl
        self.birth[self.n] = birth
        self.n += 1

    def arrays(self):
        n = self.n
        return self.params[:n].copy(), self.loglike[:n].copy(), self.birth[:n].copy()


def _init_live(rng, d, nlive, half_width, like_id):
    params = np.empty((nlive, d))
    for i in range(nlive):
        for j in range(d):
            params[i, j] = -half_width + 2.0 * half_width * rng.random()
    logl = np.array([_loglike(like_id, params[i]) for i in range(nlive)])
    birth = np.full(nlive, -np.inf)
    return params, logl, birth


def _finalize(dead, live_params, live_logl, live_birth, worst):
    """Append the surviving live points in ascending likelihood order."""
    survivors = [i for i in range(len(live_logl)) if i != worst]
    survivors.sort(key=lambda i: live_logl[i])
    for i in survivors:
        dead.append(live_params[i], live_logl[i], live_birth[i])
    return dead.arrays()


def perfect_gaussian_points(rng, d, nlive, log_term_frac, half_width=30.0):
    """Generate dead points by exact nested sampling of the unit Gaussian.

    Replacement points are drawn uniformly within the iso-likelihood sphere
    (direction from normalized normals, radius ``r* u^(1/d)``) once the
    sphere fits inside the prior box, and by rejection from the box before
    that.  Returns ``(params, loglike, birth_loglike, n_like_calls)``.
    """
    live_params, live_logl, live_birth = _init_live(rng, d, nlive, half_width, GAUSSIAN)
    ncall = nlive
    dead = _DeadBuffer(d, 64 * nlive)
    inv_n = 1.0 / nlive
    log_gap = math.log1p(-math.exp(-inv_n))
    logz = -math.inf
    t = 0
    while True:
        worst = int(np.argmin(live_logl))
        logl_w = float(live_logl[worst])
        dead.append(live_params[worst], logl_w, live_birth[worst])
        t += 1
        logz = _logaddexp(logz, logl_w - (t - 1) * inv_n + log_gap)
        live_logl[worst] = -np.inf
        logl_max = float(np.max(live_logl))
        if logl_max - t * inv_n < logz + log_term_frac:
            break
        r_star = math.sqrt(float(live_params[worst] @ live_params[worst]))
        if r_star <= half_width:
            v = _normals(rng, d)
            norm = math.sqrt(float(v @ v))
            if norm == 0.0:
                v[0], norm = 1.0, 1.0
            radius = r_star * rng.random() ** (1.0 / d)
            new = v * (radius / norm)
        else:
            while True:
                new = np.array(
                    [-half_width + 2.0 * half_width * rng.random() for _ in range(d)]
                )
                if float(new @ new) < r_star * r_star:
                    break
        live_params[worst] = new
        live_logl[worst] = gaussian_loglike_point(new)
        live_birth[worst] = logl_w
        ncall += 1
    params, logl, birth = _finalize(dead, live_params, live_logl, live_birth, worst)
    return params, logl, birth, ncall


def _slice_chain(rng, x, x_logl, threshold, live_params, worst, num_repeats,
                 like_id, half_width, max_expand, max_shrink):
    """num_repeats univariate slice updates of x within the constraint.

    Returns the final point, its log-likelihood and the number of
    log-likelihood evaluations spent.
    """
    d = len(x)
    ncall = 0
    keep = np.arange(len(live_params)) != worst

    def logl_inside(y):
        """Log-likelihood if y lies in the slice, else None."""
        nonlocal ncall
        if np.max(np.abs(y)) > half_width:
            return None
        ncall += 1
        value = _loglike(like_id, y)
        return value if value > threshold else None

    for _ in range(num_repeats):
        v = _normals(rng, d)
        norm = math.sqrt(float(v @ v))
        if norm == 0.0:
            v[0], norm = 1.0, 1.0
        v /= norm
        proj = live_params[keep] @ v
        width = float(np.std(proj, ddof=1)) if len(proj) > 1 else 1.0
        if not width > 0.0 or not math.isfinite(width):
            width = 1.0
        left = -width * rng.random()
        right = left + width
        for _ in range(max_expand):
            if logl_inside(x + left * v) is None:
                break
            left -= width
        for _ in range(max_expand):
            if logl_inside(x + right * v) is None:
                break
            right += width
        for _ in range(max_shrink):
            offset = left + rng.random() * (right - left)
            proposal = x + offset * v
            value = logl_inside(proposal)
            if value is not None:
                x, x_logl = proposal, value
                break
            if offset < 0.0:
                left = offset
            else:
                right = offset
        else:
            raise SliceBracketError(
                f"no in-slice point after {max_shrink} shrink steps"
            )
    return x, x_logl, ncall


def slice_run_points(rng, like_id, d, nlive, num_repeats, log_term_frac,
                     half_width=30.0, max_expand=20, max_shrink=100):
    """Generate dead points with a slice-sampling nested sampler.

    Each replacement starts at a uniformly chosen surviving live point and
    undergoes ``num_repeats`` univariate slice updates along random isotropic
    directions, with stepping-out then shrinkage against the likelihood
    constraint and the prior box.  Returns
    ``(params, loglike, birth_loglike, n_like_calls)``.
    """
    if nlive < 2:
        raise ValueError("slice sampler needs nlive >= 2")
    if d > 64:
        raise ValueError("slice kernel supports at most 64 dimensions")
    live_params, live_logl, live_birth = _init_live(
        rng, d, nlive, half_width, like_id
    )
    ncall = nlive
    dead = _DeadBuffer(d, 64 * nlive)
    inv_n = 1.0 / nlive
    log_gap = math.log1p(-math.exp(-inv_n))
    logz = -math.inf
    t = 0
    while True:
        worst = int(np.argmin(live_logl))
        logl_w = float(live_logl[worst])
        dead.append(live_params[worst], logl_w, live_birth[worst])
        t += 1
        logz = _logaddexp(logz, logl_w - (t - 1) * inv_n + log_gap)
        live_logl[worst] = -np.inf
        logl_max = float(np.max(live_logl))
        if logl_max - t * inv_n < logz + log_term_frac:
            break
        k = _bounded_int(rng, nlive - 1)
        if k >= worst:
            k += 1
        x, logl_new, calls = _slice_chain(
            rng, live_params[k].copy(), float(live_logl[k]), logl_w,
            live_params, worst, num_repeats, like_id, half_width,
            max_expand, max_shrink,
        )
        ncall += calls
        live_params[worst] = x
        live_logl[worst] = logl_new
        live_birth[worst] = logl_w
    params, logl, birth = _finalize(dead, live_params, live_logl, live_birth, worst)
    return params, logl, birth, ncall
