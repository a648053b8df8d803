# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the numerical kernels.

Same contracts as :mod:`vaq._kernels._fallback`; fused loops avoid the
temporaries the NumPy version allocates per call.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def class_posteriors(double[:, ::1] log_prior,
                     double[:, :, ::1] log_theta,
                     double[:, :, ::1] log_comp,
                     cnp.int64_t[::1] idx,
                     cnp.int8_t[::1] vals):
    """Per-draw class posteriors; see the NumPy backend for the contract."""
    cdef Py_ssize_t B = log_prior.shape[0]
    cdef Py_ssize_t C = log_prior.shape[1]
    cdef Py_ssize_t k = idx.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((B, C))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t b, y, i, j
    cdef double s, mx, tot, v

    for b in range(B):
        mx = -np.inf
        for y in range(C):
            s = log_prior[b, y]
            for i in range(k):
                j = idx[i]
                if vals[i]:
                    s += log_theta[b, y, j]
                else:
                    s += log_comp[b, y, j]
            out[b, y] = s
            if s > mx:
                mx = s
        tot = 0.0
        for y in range(C):
            v = exp(out[b, y] - mx)
            out[b, y] = v
            tot += v
        for y in range(C):
            out[b, y] /= tot
    return out_arr


def pwkl_scores(double[:, :, ::1] theta,
                double[:, :, ::1] log_theta,
                double[:, :, ::1] log_comp,
                double[:, ::1] post,
                cnp.int64_t[::1] yhat,
                cnp.int64_t[::1] cand):
    """Posterior-weighted KL scores; see the NumPy backend for the contract."""
    cdef Py_ssize_t B = theta.shape[0]
    cdef Py_ssize_t C = theta.shape[1]
    cdef Py_ssize_t m = cand.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(m)
    cdef double[::1] out = out_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc1_arr = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc2_arr = np.empty(m)
    cdef double[::1] acc1 = acc1_arr
    cdef double[::1] acc2 = acc2_arr
    cdef Py_ssize_t b, y, i, j, yh
    cdef double w, t, s

    for b in range(B):
        for i in range(m):
            acc1[i] = 0.0
            acc2[i] = 0.0
        for y in range(C):
            w = post[b, y]
            for i in range(m):
                j = cand[i]
                acc1[i] += w * log_theta[b, y, j]
                acc2[i] += w * log_comp[b, y, j]
        yh = yhat[b]
        for i in range(m):
            j = cand[i]
            t = theta[b, yh, j]
            s = t * (log_theta[b, yh, j] - acc1[i]) \
                + (1.0 - t) * (log_comp[b, yh, j] - acc2[i])
            if s > 0.0:
                out[i] += s
    for i in range(m):
        out[i] /= B
    return out_arr
