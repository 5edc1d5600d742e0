# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled polar-code hot loops (same contract as ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, log, log1p, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef unsigned char u8

# magnitude below which the tanh form is used (keeps relative accuracy)
cdef double SWITCH = 10.0


cdef inline double _f(double a, double b, bint minsum) noexcept nogil:
    cdef double aa = fabs(a), ab = fabs(b), lo, hi, m, x, y, p, q
    if aa < ab:
        lo = aa
        hi = ab
    else:
        lo = ab
        hi = aa
    if lo == 0.0:
        return 0.0
    if minsum:
        m = lo
    elif lo < SWITCH:
        # |f| = log1p((1 - x)(1 - y) / (x + y)) with x = e^-|a|, y = e^-|b|;
        # 1 - x comes from expm1 when it would cancel, so the result keeps
        # full relative precision down to the smallest magnitudes
        x = exp(-aa)
        y = exp(-ab)
        p = -expm1(-aa) if aa < 0.7 else 1.0 - x
        q = -expm1(-ab) if ab < 0.7 else 1.0 - y
        m = log1p(p * q / (x + y))
    else:
        # |f| = lo + ln((1 + e^-(|a|+|b|)) / (1 + e^-(hi-lo))); terms below
        # exp(-40) vanish next to 1.0 in double precision and are skipped
        x = 1.0
        y = 1.0
        if aa + ab < 40.0:
            x = 1.0 + exp(-(aa + ab))
        if hi - lo < 40.0:
            y = 1.0 + exp(lo - hi)
        m = lo + log(x / y)
    return -m if (a < 0) != (b < 0) else m


cdef inline void _transform(u8* x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t h = 1, s, j
    while h < n:
        s = 0
        while s < n:
            for j in range(h):
                x[s + j] ^= x[s + h + j]
            s += 2 * h
        h *= 2


cdef void _node(const double* L, Py_ssize_t n, const u8* fval, const Py_ssize_t* cs,
                u8* u, u8* x, double* scratch, bint minsum) noexcept nogil:
    cdef Py_ssize_t h, j
    if cs[n] == cs[0]:
        for j in range(n):
            u[j] = fval[j]
            x[j] = fval[j]
        _transform(x, n)
        return
    if n == 1:
        u[0] = 1 if L[0] < 0 else 0
        x[0] = u[0]
        return
    h = n // 2
    for j in range(h):
        scratch[j] = _f(L[j], L[j + h], minsum)
    _node(scratch, h, fval, cs, u, x, scratch + h, minsum)
    for j in range(h):
        if x[j]:
            scratch[j] = L[j + h] - L[j]
        else:
            scratch[j] = L[j + h] + L[j]
    _node(scratch, h, fval + h, cs + h, u + h, x + h, scratch + h, minsum)
    for j in range(h):
        x[j] ^= x[j + h]


def boxplus(a, b, minsum=False):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a).reshape(-1)
    cdef const double[::1] bv = np.ascontiguousarray(b).reshape(-1)
    cdef double[::1] ov = out.reshape(-1)
    cdef Py_ssize_t i
    cdef bint ms = minsum
    with nogil:
        for i in range(av.shape[0]):
            ov[i] = _f(av[i], bv[i], ms)
    return out


def polar_transform(u):
    x = np.array(u, dtype=np.uint8, copy=True, order="C")
    cdef u8[:, ::1] xv = x
    cdef Py_ssize_t b, B = xv.shape[0], N = xv.shape[1]
    with nogil:
        for b in range(B):
            _transform(&xv[b, 0], N)
    return x


def sc_decode(llr, frozen, fval, minsum=False):
    cdef const double[:, ::1] L = np.ascontiguousarray(llr, dtype=np.float64)
    cdef const u8[::1] fv = np.ascontiguousarray(fval, dtype=np.uint8)
    cdef Py_ssize_t B = L.shape[0], N = L.shape[1], b
    cdef Py_ssize_t[::1] cs = np.concatenate(
        [[0], np.cumsum(np.asarray(frozen, dtype=np.uint8) == 0)]
    ).astype(np.intp)
    u = np.empty((B, N), dtype=np.uint8)
    x = np.empty((B, N), dtype=np.uint8)
    cdef u8[:, ::1] uv = u, xv = x
    cdef double[::1] scratch = np.empty(max(N, 1), dtype=np.float64)
    cdef bint ms = minsum
    if B == 0:
        return u, x
    with nogil:
        for b in range(B):
            _node(&L[b, 0], N, &fv[0], &cs[0], &uv[b, 0], &xv[b, 0], &scratch[0], ms)
    return u, x


def genie_stats(llr, minsum=False):
    cdef const double[:, ::1] L = np.ascontiguousarray(llr, dtype=np.float64)
    cdef Py_ssize_t S = L.shape[0], N = L.shape[1], r, h, s, j
    counts = np.zeros(N, dtype=np.int64)
    soft = np.zeros(N, dtype=np.float64)
    total = np.zeros(N, dtype=np.float64)
    cdef cnp.int64_t[::1] cv = counts
    cdef double[::1] sv = soft
    cdef double[::1] tv = total
    cdef bint ms = minsum
    cdef double a, bb, e
    cdef double* buf = <double*> malloc(N * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for r in range(S):
                for j in range(N):
                    buf[j] = L[r, j]
                h = N // 2
                while h >= 1:
                    s = 0
                    while s < N:
                        for j in range(h):
                            a = buf[s + j]
                            bb = buf[s + h + j]
                            buf[s + j] = _f(a, bb, ms)
                            buf[s + h + j] = a + bb
                        s += 2 * h
                    h //= 2
                for j in range(N):
                    if buf[j] < 0:
                        cv[j] += 2
                    elif buf[j] == 0.0:
                        cv[j] += 1
                    e = exp(-fabs(buf[j]))
                    sv[j] += e / (1.0 + e)
                    tv[j] += buf[j]
    finally:
        free(buf)
    return counts, soft, total
