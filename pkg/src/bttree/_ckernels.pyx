# cython: language_level=3
"""Compiled split-statistics kernels.

Must stay bit-for-bit identical to ``_pykernels``: same summation order,
libm ``log2``, no FP contraction.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()


cdef double _entropy(const long long* counts, Py_ssize_t k, long long total) noexcept nogil:
    cdef double h = 0.0
    cdef double p
    cdef Py_ssize_t o
    for o in range(k):
        if counts[o] > 0:
            p = <double>counts[o] / <double>total
            h -= p * log2(p)
    return h


def outcome_counts(const int[::1] y, const long long[::1] rows, int n_outcomes):
    cdef cnp.ndarray[long long, ndim=1] out = np.zeros(n_outcomes, dtype=np.int64)
    cdef long long[::1] c = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(rows.shape[0]):
            c[y[rows[i]]] += 1
    return out


def entropy_from_counts(const long long[::1] counts):
    cdef long long total = 0
    cdef Py_ssize_t o
    for o in range(counts.shape[0]):
        total += counts[o]
    if total <= 0:
        raise ValueError("entropy of an empty tally")
    return _entropy(&counts[0], counts.shape[0], total)


def split_gains(const int[:, ::1] X, const int[::1] y, const long long[::1] rows,
                const long long[::1] attrs, const int[::1] n_values, int n_outcomes):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t n_attrs = attrs.shape[0]
    cdef Py_ssize_t k = n_outcomes
    cdef Py_ssize_t a, i, v, o, r, attr, nv
    cdef long long size
    cdef double parent_h, weighted
    cdef cnp.ndarray[double, ndim=1] gains = np.zeros(n_attrs, dtype=np.float64)
    cdef double[::1] g = gains
    if n == 0:
        raise ValueError("split gains over an empty row set")

    cdef Py_ssize_t max_values = 1
    for a in range(n_attrs):
        if n_values[attrs[a]] > max_values:
            max_values = n_values[attrs[a]]
    cdef long long[::1] parent = np.zeros(k, dtype=np.int64)
    cdef long long[:, ::1] table = np.zeros((max_values, k), dtype=np.int64)
    cdef long long[::1] sizes = np.zeros(max_values, dtype=np.int64)

    with nogil:
        for i in range(n):
            parent[y[rows[i]]] += 1
        parent_h = _entropy(&parent[0], k, n)
        for a in range(n_attrs):
            attr = attrs[a]
            nv = n_values[attr]
            table[:nv, :] = 0
            sizes[:nv] = 0
            for i in range(n):
                r = rows[i]
                table[X[r, attr], y[r]] += 1
                sizes[X[r, attr]] += 1
            weighted = 0.0
            for v in range(nv):
                size = sizes[v]
                if size > 0:
                    weighted += (<double>size / <double>n) * _entropy(&table[v, 0], k, size)
            g[a] = parent_h - weighted
    return gains
