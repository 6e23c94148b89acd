# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels. Mirrors ``_kernels_py`` exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline i64 _find(i64[::1] parent, i64 i) noexcept nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def component_labels(Py_ssize_t n, const i64[::1] src, const i64[::1] dst):
    cdef i64[::1] parent = np.arange(n, dtype=np.int64)
    cdef i64[::1] size = np.ones(n, dtype=np.int64)
    cdef i64[::1] low = np.arange(n, dtype=np.int64)
    cdef Py_ssize_t k
    cdef i64 a, b
    with nogil:
        for k in range(src.shape[0]):
            a = _find(parent, src[k])
            b = _find(parent, dst[k])
            if a == b:
                continue
            if size[a] < size[b]:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
            if low[b] < low[a]:
                low[a] = low[b]
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] labels = out
    with nogil:
        for k in range(n):
            labels[k] = low[_find(parent, k)]
    return out


def cooccurrence(const i64[::1] fwd_indptr, const i64[::1] fwd_indices,
                 const i64[::1] rev_indptr, const i64[::1] rev_indices,
                 i64 anchor):
    cdef Py_ssize_t n = rev_indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int64)
    cdef i64[::1] counts = out
    cdef i64 p, q, d
    with nogil:
        for p in range(rev_indptr[anchor], rev_indptr[anchor + 1]):
            d = rev_indices[p]
            for q in range(fwd_indptr[d], fwd_indptr[d + 1]):
                counts[fwd_indices[q]] += 1
        counts[anchor] = 0
    return out


def pair_matrix(const i64[::1] fwd_indptr, const i64[::1] fwd_indices,
                const i64[::1] rows, const i64[::1] member_pos, Py_ssize_t m):
    out = np.zeros((m, m), dtype=np.int64)
    cdef i64[:, ::1] mat = out
    cdef i64[::1] hits = np.empty(max(m, 1), dtype=np.int64)
    cdef Py_ssize_t r, h, i, j
    cdef i64 p, d, pos
    with nogil:
        for r in range(rows.shape[0]):
            d = rows[r]
            h = 0
            for p in range(fwd_indptr[d], fwd_indptr[d + 1]):
                pos = member_pos[fwd_indices[p]]
                if pos >= 0:
                    hits[h] = pos
                    h += 1
            for i in range(h):
                for j in range(i + 1, h):
                    mat[hits[i], hits[j]] += 1
                    mat[hits[j], hits[i]] += 1
    return out
