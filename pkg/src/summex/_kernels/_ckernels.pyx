# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmap kernels for the mining and catalog-scan hot loops."""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static inline int POPCOUNT64(unsigned long long x) {
        int c = 0;
        while (x) { x &= x - 1; c++; }
        return c;
    }
    #endif
    """
    int POPCOUNT64(uint64_t x) nogil

BACKEND = "compiled"


def popcount(const uint64_t[::1] words):
    cdef Py_ssize_t i
    cdef int64_t total = 0
    with nogil:
        for i in range(words.shape[0]):
            total += POPCOUNT64(words[i])
    return total


def and_popcount(const uint64_t[::1] a, const uint64_t[::1] b):
    cdef Py_ssize_t i
    cdef int64_t total = 0
    with nogil:
        for i in range(a.shape[0]):
            total += POPCOUNT64(a[i] & b[i])
    return total


def intersect(const uint64_t[::1] a, const uint64_t[::1] b):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(a.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(a.shape[0]):
            view[i] = a[i] & b[i]
    return out


def is_subset(const uint64_t[::1] a, const uint64_t[::1] b):
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        if a[i] & ~b[i]:
            return False
    return True


def facet_counts(const uint64_t[::1] t, const uint64_t[:, ::1] occ):
    cdef Py_ssize_t n = occ.shape[0], w = occ.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] view = out
    cdef Py_ssize_t j, i
    cdef int64_t c
    with nogil:
        for j in range(n):
            c = 0
            for i in range(w):
                c += POPCOUNT64(t[i] & occ[j, i])
            view[j] = c
    return out


def superset_scan(
    const uint64_t[:, ::1] members,
    const int64_t[::1] sizes,
    const int64_t[::1] order,
    const uint64_t[::1] query,
    int64_t query_size,
    int64_t limit,
):
    cdef Py_ssize_t w = members.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(min(limit, order.shape[0]), dtype=np.int64)
    cdef int64_t[::1] view = out
    cdef Py_ssize_t pos, i
    cdef int64_t cid, found = 0
    cdef bint ok
    with nogil:
        for pos in range(order.shape[0]):
            cid = order[pos]
            if sizes[cid] <= query_size:
                continue
            ok = True
            for i in range(w):
                if query[i] & ~members[cid, i]:
                    ok = False
                    break
            if ok:
                view[found] = cid
                found += 1
                if found >= limit:
                    break
    return out[:found]
