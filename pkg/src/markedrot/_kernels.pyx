# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels; see _fallback for the reference semantics."""

from libc.stdint cimport uint64_t, int32_t, int64_t, uint8_t


def orbit_labels(uint64_t x0, uint64_t alpha, const uint64_t[::1] cuts,
                 uint64_t tol0, uint64_t tol_step,
                 int32_t[::1] labels, uint8_t[::1] flags):
    cdef Py_ssize_t n = labels.shape[0]
    cdef Py_ssize_t m = cuts.shape[0]
    cdef Py_ssize_t k, lo, hi, mid
    cdef uint64_t pos = x0
    cdef uint64_t tol = tol0
    cdef uint64_t dl, dr, right
    cdef Py_ssize_t nflag = 0
    for k in range(n):
        lo = 0
        hi = m
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if cuts[mid] <= pos:
                lo = mid
            else:
                hi = mid
        right = cuts[lo + 1] if lo + 1 < m else 0
        dl = pos - cuts[lo]
        dr = right - pos
        labels[k] = <int32_t>lo
        if dl <= tol or dr <= tol:
            flags[k] = 1
            nflag += 1
        else:
            flags[k] = 0
        pos += alpha
        tol += tol_step
    return nflag


def prefix_perm_index(const int32_t[::1] labels, const int32_t[:, ::1] table,
                      int32_t start, int32_t[::1] out):
    cdef Py_ssize_t n = labels.shape[0]
    cdef Py_ssize_t k
    cdef int32_t cur = start
    out[0] = cur
    for k in range(n):
        cur = table[labels[k], cur]
        out[k + 1] = cur


def shift_mismatch(const int32_t[::1] labels, const int32_t[::1] pidx,
                   const int32_t[:, ::1] images, Py_ssize_t q, Py_ssize_t N,
                   int64_t[::1] out):
    cdef Py_ssize_t d = images.shape[1]
    cdef Py_ssize_t k, s
    cdef int32_t a, b
    cdef bint dl
    for s in range(d):
        out[s] = 0
    for k in range(N):
        dl = labels[k] != labels[k + q]
        a = pidx[k]
        b = pidx[k + q]
        for s in range(d):
            if dl or images[a, s] != images[b, s]:
                out[s] += 1


def first_hit(uint64_t g, uint64_t alpha, uint64_t z, Py_ssize_t k0,
              Py_ssize_t kmax, uint64_t tol0, uint64_t tol_step):
    cdef Py_ssize_t k
    cdef uint64_t u = g - (<uint64_t>k0) * alpha
    cdef uint64_t tol = tol0 + (<uint64_t>k0) * tol_step
    cdef uint64_t dz, d0
    for k in range(k0, kmax):
        dz = u - z if u >= z else z - u
        d0 = u if u < (0 - u) else (0 - u)
        if dz <= tol or d0 <= tol:
            return k, 1
        if u < z:
            return k, 0
        u -= alpha
        tol += tol_step
    return kmax, -1
