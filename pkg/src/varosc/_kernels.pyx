# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the operator-power stream and the theta-grid symbol sums."""
import numpy as np
from libc.math cimport sin, cos, sqrt, hypot
from libc.stdlib cimport malloc, free

NAME = "cython"


def stream_averages(B, f, checkpoints, bint compensated=False):
    cdef const double complex[:, ::1] b = np.ascontiguousarray(B, dtype=np.complex128)
    cdef double complex[::1] g = np.array(f, dtype=np.complex128)
    cdef const long long[::1] cps = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef Py_ssize_t d = g.shape[0]
    cdef Py_ssize_t ncp = cps.shape[0]
    out_arr = np.empty((ncp, d), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[::1] gn = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] s = np.zeros(d, dtype=np.complex128)
    cdef double complex[::1] c = np.zeros(d, dtype=np.complex128)
    cdef double complex acc, y, t
    cdef long long j, nmax
    cdef Py_ssize_t i, l, nxt = 0
    if ncp == 0:
        return out_arr
    nmax = cps[ncp - 1]
    with nogil:
        for j in range(1, nmax + 1):
            for i in range(d):
                acc = 0
                for l in range(d):
                    acc = acc + b[i, l] * g[l]
                gn[i] = acc
            for i in range(d):
                g[i] = gn[i]
                if compensated:
                    y = gn[i] - c[i]
                    t = s[i] + y
                    c[i] = (t - s[i]) - y
                    s[i] = t
                else:
                    s[i] = s[i] + gn[i]
            if j == cps[nxt]:
                for i in range(d):
                    out[nxt, i] = s[i] / <double>j
                nxt += 1
    return out_arr


cdef inline void _symbol(double n, double th, double *re, double *im) noexcept nogil:
    cdef double half = 0.5 * th
    cdef double mag = sin(n * half) / (n * sin(half))
    cdef double ph = half * (n + 1.0)
    re[0] = cos(ph) * mag
    im[0] = sin(ph) * mag


def variation_grid(terms, thetas):
    cdef const double[::1] nk = np.ascontiguousarray(terms, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t K = nk.shape[0], G = th.shape[0], q, k
    total_a = np.zeros(G)
    small_a = np.zeros(G)
    large_a = np.zeros(G)
    k0_a = np.zeros(G, dtype=np.int64)
    cdef double[::1] total = total_a, small = small_a, large = large_a
    cdef long long[::1] k0 = k0_a
    cdef double pr, pi, cr, ci, dv, t, sm, lg
    cdef long long first
    with nogil:
        for q in range(G):
            t = th[q]
            sm = 0.0
            lg = 0.0
            first = 0
            _symbol(nk[0], t, &pr, &pi)
            for k in range(K):
                if first == 0 and t * nk[k] >= 1.0:
                    first = k + 1
                if k + 1 < K:
                    _symbol(nk[k + 1], t, &cr, &ci)
                    dv = hypot(cr - pr, ci - pi)
                    if t * nk[k] >= 1.0:
                        lg = lg + dv
                    else:
                        sm = sm + dv
                    pr = cr
                    pi = ci
            small[q] = sm
            large[q] = lg
            total[q] = sm + lg
            k0[q] = first
    return total_a, small_a, large_a, k0_a


def oscillation_grid(terms, mvals, owner, thetas):
    cdef const double[::1] nk = np.ascontiguousarray(terms, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(mvals, dtype=np.float64)
    cdef const long long[::1] own = np.ascontiguousarray(owner, dtype=np.int64)
    cdef const double[::1] th = np.ascontiguousarray(thetas, dtype=np.float64)
    cdef Py_ssize_t K = nk.shape[0], G = th.shape[0], Mn = mv.shape[0], q, k, j
    total_a = np.zeros(G)
    small_a = np.zeros(G)
    large_a = np.zeros(G)
    k0_a = np.zeros(G, dtype=np.int64)
    cdef double[::1] total = total_a, small = small_a, large = large_a
    cdef long long[::1] k0 = k0_a
    cdef double *are = <double *> malloc(K * sizeof(double))
    cdef double *aim = <double *> malloc(K * sizeof(double))
    cdef double *sup = <double *> malloc(K * sizeof(double))
    cdef double t, mr, mi, dv, sm, lg
    cdef long long first, w
    if are == NULL or aim == NULL or sup == NULL:
        free(are); free(aim); free(sup)
        raise MemoryError()
    try:
        with nogil:
            for q in range(G):
                t = th[q]
                first = 0
                for k in range(K):
                    _symbol(nk[k], t, &are[k], &aim[k])
                    sup[k] = 0.0
                    if first == 0 and t * nk[k] >= 1.0:
                        first = k + 1
                for j in range(Mn):
                    w = own[j]
                    if w < 0:
                        continue
                    _symbol(mv[j], t, &mr, &mi)
                    dv = hypot(mr - are[w], mi - aim[w])
                    if dv > sup[w]:
                        sup[w] = dv
                sm = 0.0
                lg = 0.0
                for k in range(K - 1):
                    if t * nk[k] >= 1.0:
                        lg = lg + sup[k]
                    else:
                        sm = sm + sup[k]
                small[q] = sm
                large[q] = lg
                total[q] = sm + lg
                k0[q] = first
    finally:
        free(are); free(aim); free(sup)
    return total_a, small_a, large_a, k0_a
