# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernels: stationary fixed point and chain simulation.

Mirrors kernels._py; the chain simulator consumes identical pre-drawn
uniforms so counts match the fallback bit for bit.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def transition(P, p, rates):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P_ = np.ascontiguousarray(P)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_ = np.ascontiguousarray(p)
    cdef int n = P_.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r_
    if rates is None:
        _transition_uniform(P_, p_, out, n)
    else:
        r_ = np.ascontiguousarray(rates)
        _transition_general(P_, r_, p_, out, n)
    return out


cdef void _transition_uniform(double[:, ::1] P, double[::1] p, double[::1] out, int n):
    cdef int i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += P[i, j] * (p[i] + p[j])
        out[i] = acc / n


cdef void _transition_general(double[:, ::1] P, double[:, ::1] r, double[::1] p,
                              double[::1] out, int n):
    cdef int i, k
    cdef double stay, inflow
    for i in range(n):
        stay = 1.0
        inflow = 0.0
        for k in range(n):
            stay += r[i, k] * (P[i, k] - 1.0)
            inflow += P[i, k] * r[k, i] * p[k]
        out[i] = p[i] * stay + inflow


def solve_stationary(P, rates, double tol, long max_iters):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P_ = np.ascontiguousarray(P, dtype=np.float64)
    cdef int n = P_.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.full(n, 1.0 / n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tp = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r_
    cdef bint uniform = rates is None
    if not uniform:
        r_ = np.ascontiguousarray(rates, dtype=np.float64)
    cdef double resid, d, total
    cdef long it
    cdef int i
    resid = np.inf
    for it in range(1, max_iters + 1):
        if uniform:
            _transition_uniform(P_, p, tp, n)
        else:
            _transition_general(P_, r_, p, tp, n)
        resid = 0.0
        for i in range(n):
            d = p[i] - tp[i]
            if d < 0:
                d = -d
            if d > resid:
                resid = d
        if resid <= tol:
            return p, it, resid
        total = 0.0
        for i in range(n):
            p[i] = 0.5 * (p[i] + tp[i])
            if p[i] < 0.0:
                p[i] = 0.0
            total += p[i]
        for i in range(n):
            p[i] /= total
    return p, max_iters, resid


def chain_counts(P, rates, u_init, u_chal, u_win, long burn_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P_ = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ui = np.ascontiguousarray(u_init, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] uc = np.ascontiguousarray(u_chal, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] uw = np.ascontiguousarray(u_win, dtype=np.float64)
    cdef int n = P_.shape[0]
    cdef long total_steps = uc.shape[0]
    cdef long reps = uc.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((reps, n), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cum
    cdef bint uniform = rates is None
    if not uniform:
        cum = np.cumsum(np.ascontiguousarray(rates, dtype=np.float64), axis=1)
    cdef long rep, t
    cdef int s, q, j
    cdef double u
    for rep in range(reps):
        s = <int>(ui[rep] * n)
        if s > n - 1:
            s = n - 1
        for t in range(total_steps):
            if uniform:
                q = <int>(uc[t, rep] * n)
                if q > n - 1:
                    q = n - 1
            else:
                u = uc[t, rep]
                q = -1
                for j in range(n):
                    if u < cum[s, j]:
                        q = j
                        break
            if q >= 0 and q != s and uw[t, rep] < P_[q, s]:
                s = q
            if t >= burn_in:
                counts[rep, s] += 1
    return counts
