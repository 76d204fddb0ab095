# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled estimator kernels (see _fallback.py for the reference numpy
implementations and the full contracts)."""

from libc.math cimport erfc, exp, log, sqrt
from libc.stdint cimport int64_t


cdef double INV_SQRT2 = 1.0 / sqrt(2.0)


def crude_chunk(const double[:, ::1] x, double u):
    cdef Py_ssize_t i, k, m = x.shape[0], d = x.shape[1]
    cdef int64_t hits = 0
    cdef double s
    with nogil:
        for i in range(m):
            s = 0.0
            for k in range(d):
                s += x[i, k]
            if s > u:
                hits += 1
    return hits


def conditional_chunk(const double[:, ::1] y, const double[:, ::1] umix,
                      double[::1] out, double u, const double[::1] lam,
                      const double[::1] bg, const int64_t[:, ::1] others,
                      const double[:, ::1] alpha, const double[::1] cond_sd,
                      const double[:, ::1] shift,
                      const double[:, ::1] tilt_vec,
                      const double[::1] tilt_const, double mix):
    cdef Py_ssize_t i, j, k, m = y.shape[0], d = y.shape[1]
    cdef Py_ssize_t n_oth = d - 1
    cdef double acc, q, w, yk, xk, mx, sm, threshold, mu_c, z, eq
    cdef bint picked
    cdef bint tilted = mix > 0.0
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(d):
                picked = tilted and umix[i, j] < mix
                q = 0.0
                mx = 0.0
                sm = 0.0
                mu_c = 0.0
                for k in range(n_oth):
                    yk = y[i, others[j, k]]
                    if picked:
                        yk += shift[j, k]
                    if tilted:
                        q += tilt_vec[j, k] * yk
                    xk = lam[others[j, k]] * exp(bg[others[j, k]] * yk)
                    sm += xk
                    if xk > mx:
                        mx = xk
                    mu_c += alpha[j, k] * yk
                if tilted:
                    q -= tilt_const[j]
                    # w = 1 / (mix*e^q + (1-mix)), kept stable for any q
                    if q > 0.0:
                        eq = exp(-q)
                        w = eq / (mix + (1.0 - mix) * eq)
                    else:
                        w = 1.0 / (mix * exp(q) + (1.0 - mix))
                else:
                    w = 1.0
                threshold = u - sm
                if mx > threshold:
                    threshold = mx
                z = (log(threshold / lam[j]) / bg[j] - mu_c) / cond_sd[j]
                acc += w * 0.5 * erfc(z * INV_SQRT2)
            out[i] = acc
