# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled split-search kernels.

Arithmetic follows the same operation order as ``_split_py`` so both
backends produce bit-identical score tables.
"""

from cython.parallel cimport prange
from libc.math cimport INFINITY


cdef void _scan_feature(const double[:, ::1] Xt, const double[::1] r,
                        const Py_ssize_t[:, ::1] order, Py_ssize_t f,
                        Py_ssize_t start, Py_ssize_t end, double mean,
                        double q_total, double s_total, double pen,
                        Py_ssize_t min_leaf, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t m = end - start
    cdef Py_ssize_t k, i, j
    cdef double sl = 0.0
    cdef double sr, nl, nr
    for k in range(m - 1):
        i = order[f, start + k]
        j = order[f, start + k + 1]
        sl = sl + (r[i] - mean)
        nl = <double>(k + 1)
        nr = <double>(m - k - 1)
        if (k + 1 >= min_leaf and m - k - 1 >= min_leaf
                and Xt[f, i] < Xt[f, j] and pen < INFINITY):
            sr = s_total - sl
            out[f, k] = 0.5 * ((q_total - sl * sl / nl) - sr * sr / nr) + pen
        else:
            out[f, k] = INFINITY


def split_scores(const double[:, ::1] Xt, const double[::1] r,
                 const Py_ssize_t[:, ::1] order, Py_ssize_t start, Py_ssize_t end,
                 double mean, double q_total, double s_total,
                 const double[::1] penalties, Py_ssize_t min_leaf,
                 double[:, ::1] out, int n_threads=1):
    """Fill ``out[f, k]`` with the score of splitting after sorted position ``k``."""
    cdef Py_ssize_t d = Xt.shape[0]
    cdef Py_ssize_t f
    if n_threads < 1:
        n_threads = 1
    with nogil:
        for f in prange(d, num_threads=n_threads, schedule="static"):
            _scan_feature(Xt, r, order, f, start, end, mean, q_total, s_total,
                          penalties[f], min_leaf, out)


cdef void _partition_feature(Py_ssize_t[:, ::1] order, Py_ssize_t f,
                             Py_ssize_t start, Py_ssize_t end,
                             const unsigned char[::1] go_left,
                             Py_ssize_t[:, ::1] buf) noexcept nogil:
    cdef Py_ssize_t k, i
    cdef Py_ssize_t w = start
    cdef Py_ssize_t nr = 0
    for k in range(start, end):
        i = order[f, k]
        if go_left[i]:
            order[f, w] = i
            w = w + 1
        else:
            buf[f, nr] = i
            nr = nr + 1
    for k in range(nr):
        order[f, w + k] = buf[f, k]


def partition(Py_ssize_t[:, ::1] order, Py_ssize_t start, Py_ssize_t end,
              const unsigned char[::1] go_left, int n_threads=1):
    """Stable in-place partition of every feature's segment: left rows first."""
    cdef Py_ssize_t d = order.shape[0]
    cdef Py_ssize_t f
    cdef Py_ssize_t[:, ::1] buf
    import numpy as np
    buf = np.empty((d, max(end - start, 1)), dtype=np.intp)
    if n_threads < 1:
        n_threads = 1
    with nogil:
        for f in prange(d, num_threads=n_threads, schedule="static"):
            _partition_feature(order, f, start, end, go_left, buf)
