# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fmod, fabs, M_PI

cnp.import_array()


def sequence_table(states, maps, effects, int max_len):
    cdef const double complex[:, ::1] st = np.ascontiguousarray(states, dtype=complex)
    cdef const double complex[:, :, ::1] mp = np.ascontiguousarray(maps, dtype=complex)
    cdef const double complex[:, ::1] ef = np.ascontiguousarray(effects, dtype=complex)
    cdef Py_ssize_t n_s = st.shape[0]
    cdef Py_ssize_t dim = st.shape[1]
    cdef Py_ssize_t n_m = mp.shape[0]
    cdef Py_ssize_t n_e = ef.shape[0]
    cdef Py_ssize_t n_seq = 0
    cdef Py_ssize_t length, p = 1
    for length in range(max_len + 1):
        n_seq += p
        p *= n_m
    if n_m == 0:
        n_seq = 1

    out_arr = np.empty(n_s * n_seq * n_e, dtype=complex)
    cdef double complex[::1] out = out_arr
    buf_arr = np.empty((max_len + 1, dim), dtype=complex)
    cdef double complex[:, ::1] buf = buf_arr
    nxt_arr = np.zeros(max_len + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] nxt = nxt_arr

    cdef Py_ssize_t i, k, a, b, j, depth, pos = 0
    cdef double complex acc

    for i in range(n_s):
        for a in range(dim):
            buf[0, a] = st[i, a]
        depth = 0
        nxt[0] = 0
        for k in range(n_e):
            acc = 0
            for b in range(dim):
                acc = acc + ef[k, b] * buf[0, b]
            out[pos] = acc
            pos += 1
        while True:
            if depth < max_len and nxt[depth] < n_m:
                j = nxt[depth]
                nxt[depth] += 1
                for a in range(dim):
                    acc = 0
                    for b in range(dim):
                        acc = acc + mp[j, a, b] * buf[depth, b]
                    buf[depth + 1, a] = acc
                depth += 1
                nxt[depth] = 0
                for k in range(n_e):
                    acc = 0
                    for b in range(dim):
                        acc = acc + ef[k, b] * buf[depth, b]
                    out[pos] = acc
                    pos += 1
            else:
                if depth == 0:
                    break
                depth -= 1
    return out_arr


cdef inline double _circ(double x) nogil:
    cdef double two_pi = 2.0 * M_PI
    cdef double y = fmod(x + M_PI, two_pi)
    if y < 0:
        y += two_pi
    return fabs(y - M_PI)


def snd_scan(theta, double angle_tol):
    cdef const double[::1] t = np.ascontiguousarray(theta, dtype=float)
    cdef Py_ssize_t d = t.shape[0]
    cdef Py_ssize_t a, b, c, dd, e, f
    cdef double s
    for c in range(d):
        for dd in range(d):
            if dd == c:
                continue
            for e in range(d):
                if e == dd:
                    continue
                for f in range(d):
                    if f == e or f == c:
                        continue
                    s = t[c] - t[dd] + t[e] - t[f]
                    for a in range(d):
                        for b in range(d):
                            if _circ(s - (t[a] - t[b])) <= angle_tol:
                                return False
    return True
