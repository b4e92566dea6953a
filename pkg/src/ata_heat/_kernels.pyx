# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Walsh-Hadamard butterflies, Walsh sign tables,
XOR-convolution accumulation and the cyclic Thomas sweep.

Every routine mirrors ``_kernels_py`` operation for operation so that both
backends produce bitwise-identical output on the same input.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef fused scalar_t:
    double
    double complex


def fwht(scalar_t[::1] x):
    """In-place unnormalized Walsh-Hadamard transform (natural order)."""
    cdef Py_ssize_t size = x.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef scalar_t a, b
    while h < size:
        for i in range(0, size, 2 * h):
            for j in range(i, i + h):
                a = x[j]
                b = x[j + h]
                x[j] = a + b
                x[j + h] = a - b
        h *= 2


cdef inline int _parity(unsigned long long v) nogil:
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return <int>(v & 1)


def walsh_signs(const long long[::1] masks, int n):
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef Py_ssize_t m = masks.shape[0]
    out = np.empty((m, size), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t r, k
    cdef unsigned long long mask
    for r in range(m):
        mask = <unsigned long long>masks[r]
        for k in range(size):
            o[r, k] = -1.0 if _parity(mask & <unsigned long long>k) else 1.0
    return out


def xor_accumulate(const long long[::1] a_masks, scalar_t[::1] a_coef,
                   const long long[::1] b_masks, scalar_t[::1] b_coef,
                   scalar_t[::1] out):
    """out[a ^ b] += a_coef * b_coef over all pairs, row-major in (a, b)."""
    cdef Py_ssize_t i, j
    cdef Py_ssize_t na = a_masks.shape[0], nb = b_masks.shape[0]
    cdef long long am
    cdef scalar_t ac
    for i in range(na):
        am = a_masks[i]
        ac = a_coef[i]
        for j in range(nb):
            out[am ^ b_masks[j]] += ac * b_coef[j]


def thomas_cyclic(double diag, double off, scalar_t[::1] rhs):
    """Solve the symmetric cyclic tridiagonal system (constant bands).

    Thomas sweep on the Sherman-Morrison modified matrix followed by the
    rank-one corner correction.
    """
    cdef Py_ssize_t size = rhs.shape[0]
    cdef Py_ssize_t i
    cdef double gamma = -diag
    cdef double[::1] cp = np.empty(size, dtype=np.float64)
    cdef double[::1] dmod = np.empty(size, dtype=np.float64)
    cdef double[::1] zu = np.empty(size, dtype=np.float64)
    x_arr = np.empty(size, dtype=np.asarray(rhs).dtype)
    cdef scalar_t[::1] y = x_arr
    cdef double denom, fact_z
    cdef scalar_t fact_y

    dmod[0] = diag - gamma
    for i in range(1, size - 1):
        dmod[i] = diag
    dmod[size - 1] = diag - off * off / gamma

    # forward elimination shared by both right-hand sides
    cp[0] = off / dmod[0]
    y[0] = rhs[0] / dmod[0]
    zu[0] = gamma / dmod[0]
    for i in range(1, size):
        denom = dmod[i] - off * cp[i - 1]
        cp[i] = off / denom
        y[i] = (rhs[i] - off * y[i - 1]) / denom
        if i == size - 1:
            zu[i] = (off - off * zu[i - 1]) / denom
        else:
            zu[i] = (0.0 - off * zu[i - 1]) / denom
    for i in range(size - 2, -1, -1):
        y[i] = y[i] - cp[i] * y[i + 1]
        zu[i] = zu[i] - cp[i] * zu[i + 1]

    fact_y = (y[0] + off / gamma * y[size - 1])
    fact_z = 1.0 + zu[0] + off / gamma * zu[size - 1]
    fact_y = fact_y / fact_z
    for i in range(size):
        y[i] = y[i] - fact_y * zu[i]
    return x_arr
