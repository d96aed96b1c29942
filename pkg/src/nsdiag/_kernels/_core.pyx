# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled run-generation kernels.

Same algorithms and randomness contract as ``nsdiag._kernels.fallback``;
see that module's docstring.  The only primitive consumed from the PCG64
stream is ``next_double``, accessed through the bit generator capsule.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, M_PI, cos, exp, fabs, log, log1p, pow, sin, sqrt
from numpy.random cimport bitgen_t

from ..errors import SliceBracketError

cnp.import_array()

GAUSSIAN = 0
LOGGAMMA_MIX = 1

cdef double _LOG_2PI = log(2.0 * M_PI)
cdef double _LOG_HALF = -log(2.0)


cdef bitgen_t *_get_bitgen(rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _next(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef void _fill_normals(bitgen_t *bg, double *out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t k
    cdef double u1, u2, r, a
    for k in range(0, n, 2):
        u1 = _next(bg)
        u2 = _next(bg)
        r = sqrt(-2.0 * log1p(-u1))
        a = 2.0 * M_PI * u2
        out[k] = r * cos(a)
        if k + 1 < n:
            out[k + 1] = r * sin(a)


cdef inline Py_ssize_t _bounded_int(bitgen_t *bg, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t k = <Py_ssize_t>(_next(bg) * m)
    return m - 1 if k >= m else k


cdef inline double _logaddexp(double a, double b) noexcept nogil:
    cdef double t
    if a < b:
        t = a
        a = b
        b = t
    if a == -INFINITY:
        return -INFINITY
    return a + log1p(exp(b - a))


cdef inline double _lg11(double t) noexcept nogil:
    return t - exp(t)


cdef inline double _norm01(double t) noexcept nogil:
    return -0.5 * _LOG_2PI - 0.5 * t * t


cdef double _gauss_logl(const double *x, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s = 0.0
    for j in range(d):
        s += x[j] * x[j]
    return -0.5 * d * _LOG_2PI - 0.5 * s


cdef double _mix_logl(const double *x, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, split
    cdef double total
    total = _LOG_HALF + _logaddexp(_lg11(x[0] - 10.0), _lg11(x[0] + 10.0))
    total = total + _LOG_HALF + _logaddexp(_norm01(x[1] - 10.0), _lg11(x[1] + 10.0))
    split = (d + 2) // 2
    for i in range(2, d):
        if i + 1 <= split:
            total += _lg11(x[i])
        else:
            total += _norm01(x[i])
    return total


cdef inline double _loglike(int like_id, const double *x, Py_ssize_t d) noexcept nogil:
    if like_id == 0:
        return _gauss_logl(x, d)
    return _mix_logl(x, d)


def gaussian_loglike_point(x):
    """Unit isotropic Gaussian log-density at one point."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    return _gauss_logl(&xv[0], xv.shape[0])


def loggamma_mix_loglike_point(x):
    """LogGamma/Gaussian mixture log-density at one point (d even)."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    return _mix_logl(&xv[0], xv.shape[0])


cdef class _Buf:
    """Growable dead-point storage."""

    cdef object params_arr, logl_arr, birth_arr
    cdef double[:, ::1] params
    cdef double[::1] logl, birth
    cdef Py_ssize_t n, cap, d

    def __cinit__(self, Py_ssize_t d, Py_ssize_t cap):
        self.d = d
        self.cap = cap
        self.n = 0
        self.params_arr = np.empty((cap, d))
        self.logl_arr = np.empty(cap)
        self.birth_arr = np.empty(cap)
        self.params = self.params_arr
        self.logl = self.logl_arr
        self.birth = self.birth_arr

    cdef void append(self, const double *x, double logl, double birth):
        cdef Py_ssize_t j
        if self.n == self.cap:
            self._grow()
        for j in range(self.d):
            self.params[self.n, j] = x[j]
        self.logl[self.n] = logl
        self.birth[self.n] = birth
        self.n += 1

    cdef _grow(self):
        self.cap *= 2
        params_arr = np.empty((self.cap, self.d))
        logl_arr = np.empty(self.cap)
        birth_arr = np.empty(self.cap)
        params_arr[:self.n] = self.params_arr[:self.n]
        logl_arr[:self.n] = self.logl_arr[:self.n]
        birth_arr[:self.n] = self.birth_arr[:self.n]
        self.params_arr, self.logl_arr, self.birth_arr = params_arr, logl_arr, birth_arr
        self.params = params_arr
        self.logl = logl_arr
        self.birth = birth_arr

    cdef tuple arrays(self):
        return (
            np.array(self.params_arr[:self.n]),
            np.array(self.logl_arr[:self.n]),
            np.array(self.birth_arr[:self.n]),
        )


cdef inline Py_ssize_t _argmin(const double *a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, best = 0
    for i in range(1, n):
        if a[i] < a[best]:
            best = i
    return best


cdef inline double _maxval(const double *a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double best = a[0]
    for i in range(1, n):
        if a[i] > best:
            best = a[i]
    return best


cdef void _init_live(bitgen_t *bg, int like_id, double[:, ::1] params,
                     double[::1] logl, double half_width) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nlive = params.shape[0], d = params.shape[1]
    for i in range(nlive):
        for j in range(d):
            params[i, j] = -half_width + 2.0 * half_width * _next(bg)
    for i in range(nlive):
        logl[i] = _loglike(like_id, &params[i, 0], d)


def _finalize(buf, live_params, live_logl, live_birth, worst):
    cdef _Buf b = <_Buf> buf
    survivors = [i for i in range(len(live_logl)) if i != worst]
    survivors.sort(key=lambda i: live_logl[i])
    cdef double[:, ::1] lp = live_params
    for i in survivors:
        b.append(&lp[i, 0], live_logl[i], live_birth[i])
    return b.arrays()


def perfect_gaussian_points(rng, int d, int nlive, double log_term_frac,
                            double half_width=30.0):
    """Exact nested sampling of the unit Gaussian; see fallback docstring."""
    cdef bitgen_t *bg = _get_bitgen(rng)
    live_params_arr = np.empty((nlive, d))
    live_logl_arr = np.empty(nlive)
    live_birth_arr = np.full(nlive, -np.inf)
    cdef double[:, ::1] live_params = live_params_arr
    cdef double[::1] live_logl = live_logl_arr
    cdef double[::1] live_birth = live_birth_arr
    _init_live(bg, 0, live_params, live_logl, half_width)

    cdef _Buf dead = _Buf(d, 64 * nlive)
    cdef double inv_n = 1.0 / nlive
    cdef double log_gap = log1p(-exp(-inv_n))
    cdef double logz = -INFINITY
    cdef double logl_w, logl_max, r_star, norm, radius, s
    cdef Py_ssize_t t = 0, worst, j, ncall = nlive
    cdef double[::1] v = np.empty(d)

    while True:
        worst = _argmin(&live_logl[0], nlive)
        logl_w = live_logl[worst]
        dead.append(&live_params[worst, 0], logl_w, live_birth[worst])
        t += 1
        logz = _logaddexp(logz, logl_w - (<double>(t - 1)) * inv_n + log_gap)
        live_logl[worst] = -INFINITY
        logl_max = _maxval(&live_logl[0], nlive)
        if logl_max - (<double>t) * inv_n < logz + log_term_frac:
            break
        s = 0.0
        for j in range(d):
            s += live_params[worst, j] * live_params[worst, j]
        r_star = sqrt(s)
        if r_star <= half_width:
            _fill_normals(bg, &v[0], d)
            s = 0.0
            for j in range(d):
                s += v[j] * v[j]
            norm = sqrt(s)
            if norm == 0.0:
                v[0] = 1.0
                norm = 1.0
            radius = r_star * pow(_next(bg), 1.0 / d)
            for j in range(d):
                live_params[worst, j] = v[j] * (radius / norm)
        else:
            while True:
                s = 0.0
                for j in range(d):
                    v[j] = -half_width + 2.0 * half_width * _next(bg)
                    s += v[j] * v[j]
                if s < r_star * r_star:
                    break
            for j in range(d):
                live_params[worst, j] = v[j]
        live_logl[worst] = _gauss_logl(&live_params[worst, 0], d)
        live_birth[worst] = logl_w
        ncall += 1

    params, logl, birth = _finalize(
        dead, live_params_arr, live_logl_arr, live_birth_arr, worst
    )
    return params, logl, birth, ncall


cdef Py_ssize_t _slice_chain(bitgen_t *bg, int like_id, double *x, double *x_logl,
                             double threshold, double[:, ::1] live_params,
                             Py_ssize_t worst, int num_repeats, double half_width,
                             int max_expand, int max_shrink,
                             double *v, double *work) noexcept nogil:
    """Slice updates of x in place; returns likelihood calls, or -1 on failure."""
    cdef Py_ssize_t nlive = live_params.shape[0], d = live_params.shape[1]
    cdef Py_ssize_t rep, i, j, e, ncall = 0
    cdef double norm, mean, var, width, left, right, offset, value, s
    cdef bint ok
    for rep in range(num_repeats):
        _fill_normals(bg, v, d)
        s = 0.0
        for j in range(d):
            s += v[j] * v[j]
        norm = sqrt(s)
        if norm == 0.0:
            v[0] = 1.0
            norm = 1.0
        for j in range(d):
            v[j] /= norm
        # sample std of surviving live points projected on v
        mean = 0.0
        for i in range(nlive):
            if i == worst:
                continue
            s = 0.0
            for j in range(d):
                s += live_params[i, j] * v[j]
            work[i] = s
            mean += s
        mean /= (nlive - 1)
        var = 0.0
        for i in range(nlive):
            if i == worst:
                continue
            var += (work[i] - mean) * (work[i] - mean)
        width = sqrt(var / (nlive - 2)) if nlive > 2 else 1.0
        if not width > 0.0 or width != width or width == INFINITY:
            width = 1.0
        left = -width * _next(bg)
        right = left + width
        for e in range(max_expand):
            if not _in_slice(like_id, x, left, v, d, half_width, threshold, &ncall, &value):
                break
            left -= width
        for e in range(max_expand):
            if not _in_slice(like_id, x, right, v, d, half_width, threshold, &ncall, &value):
                break
            right += width
        ok = False
        for e in range(max_shrink):
            offset = left + _next(bg) * (right - left)
            if _in_slice(like_id, x, offset, v, d, half_width, threshold, &ncall, &value):
                for j in range(d):
                    x[j] = x[j] + offset * v[j]
                x_logl[0] = value
                ok = True
                break
            if offset < 0.0:
                left = offset
            else:
                right = offset
        if not ok:
            return -1
    return ncall


cdef inline bint _in_slice(int like_id, const double *x, double offset,
                           const double *v, Py_ssize_t d, double half_width,
                           double threshold, Py_ssize_t *ncall,
                           double *value) noexcept nogil:
    cdef Py_ssize_t j
    cdef double y
    cdef double buf[64]
    for j in range(d):
        y = x[j] + offset * v[j]
        if fabs(y) > half_width:
            return False
        buf[j] = y
    ncall[0] += 1
    value[0] = _loglike(like_id, buf, d)
    return value[0] > threshold


def slice_run_points(rng, int like_id, int d, int nlive, int num_repeats,
                     double log_term_frac, double half_width=30.0,
                     int max_expand=20, int max_shrink=100):
    """Slice-sampling nested sampler; see fallback docstring."""
    if nlive < 2:
        raise ValueError("slice sampler needs nlive >= 2")
    if d > 64:
        raise ValueError("slice kernel supports at most 64 dimensions")
    cdef bitgen_t *bg = _get_bitgen(rng)
    live_params_arr = np.empty((nlive, d))
    live_logl_arr = np.empty(nlive)
    live_birth_arr = np.full(nlive, -np.inf)
    cdef double[:, ::1] live_params = live_params_arr
    cdef double[::1] live_logl = live_logl_arr
    cdef double[::1] live_birth = live_birth_arr
    _init_live(bg, like_id, live_params, live_logl, half_width)

    cdef _Buf dead = _Buf(d, 64 * nlive)
    cdef double inv_n = 1.0 / nlive
    cdef double log_gap = log1p(-exp(-inv_n))
    cdef double logz = -INFINITY
    cdef double logl_w, logl_max, x_logl
    cdef Py_ssize_t t = 0, worst, j, k, calls, ncall = nlive
    cdef double[::1] v = np.empty(d)
    cdef double[::1] work = np.empty(nlive)
    cdef double[::1] x = np.empty(d)

    while True:
        worst = _argmin(&live_logl[0], nlive)
        logl_w = live_logl[worst]
        dead.append(&live_params[worst, 0], logl_w, live_birth[worst])
        t += 1
        logz = _logaddexp(logz, logl_w - (<double>(t - 1)) * inv_n + log_gap)
        live_logl[worst] = -INFINITY
        logl_max = _maxval(&live_logl[0], nlive)
        if logl_max - (<double>t) * inv_n < logz + log_term_frac:
            break
        k = _bounded_int(bg, nlive - 1)
        if k >= worst:
            k += 1
        for j in range(d):
            x[j] = live_params[k, j]
        x_logl = live_logl[k]
        calls = _slice_chain(
            bg, like_id, &x[0], &x_logl, logl_w, live_params, worst,
            num_repeats, half_width, max_expand, max_shrink, &v[0], &work[0],
        )
        if calls < 0:
            raise SliceBracketError(
                f"no in-slice point after {max_shrink} shrink steps"
            )
        ncall += calls
        for j in range(d):
            live_params[worst, j] = x[j]
        live_logl[worst] = x_logl
        live_birth[worst] = logl_w

    params, logl, birth = _finalize(
        dead, live_params_arr, live_logl_arr, live_birth_arr, worst
    )
    return params, logl, birth, ncall
