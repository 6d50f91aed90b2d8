# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; identical signatures."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def transform_amplitudes(amps, unitaries):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] u = np.ascontiguousarray(unitaries, dtype=np.complex128)
    cdef Py_ssize_t n = u.shape[0], d = u.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cur = np.array(amps, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] nxt = np.empty_like(cur)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tmp
    cdef Py_ssize_t total = cur.shape[0]
    cdef Py_ssize_t s, outer, inner, o, i, a, b, base
    cdef double complex acc
    if total != d ** n:
        raise ValueError("amplitude length does not match unitaries")
    inner = total
    for s in range(n):
        inner //= d
        outer = total // (inner * d)
        for o in range(outer):
            for i in range(inner):
                base = o * d * inner + i
                for a in range(d):
                    acc = 0
                    for b in range(d):
                        acc = acc + u[s, b, a].conjugate() * cur[base + b * inner]
                    nxt[base + a * inner] = acc
        tmp = cur
        cur = nxt
        nxt = tmp
    return cur


def uniqueness_tables(probs, Py_ssize_t n, Py_ssize_t d):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(probs, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] marg = np.zeros((n, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] best = np.zeros((n, d))
    cdef Py_ssize_t total = p.shape[0], idx, rem, s, a
    cdef double v
    if total != d ** n:
        raise ValueError("probability table length does not match n, d")
    for idx in range(total):
        v = p[idx]
        rem = idx
        for s in range(n - 1, -1, -1):
            a = rem % d
            rem = rem // d
            marg[s, a] += v
            if v > best[s, a]:
                best[s, a] = v
    return marg, best
