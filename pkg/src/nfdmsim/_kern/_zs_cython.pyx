# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Zakharov-Shabat transfer-matrix scan (hot kernel).

Must stay numerically equivalent to _zs_numpy.zs_scan; tests compare the
two backends to 1e-12."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

ctypedef double complex cdouble


def zs_scan(cnp.ndarray[cdouble, ndim=1] q, double dt, double t0,
            cnp.ndarray[double, ndim=1] lam, int scheme=0):
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t m = lam.shape[0]
    cdef cnp.ndarray[cdouble, ndim=1] a_out = np.empty(m, dtype=np.complex128)
    cdef cnp.ndarray[cdouble, ndim=1] b_out = np.empty(m, dtype=np.complex128)
    cdef Py_ssize_t i, k
    cdef double L, kap, ph, c, s, qr, qi, az2
    cdef cdouble v1, v2, nv1, z, zc, qd, qk, dl
    cdef double span = n * dt
    cdef double tsum = 2.0 * t0 + (n - 1) * dt
    cdef double cn

    for i in range(m):
        L = lam[i]
        v1 = 1.0 + 0.0j
        v2 = 0.0 + 0.0j
        if scheme == 0:
            z = cos(L * dt) - 1j * sin(L * dt)
            zc = cos(L * dt) + 1j * sin(L * dt)
            for k in range(n):
                qd = q[k] * dt
                qr = qd.real
                qi = qd.imag
                cn = 1.0 / sqrt(1.0 + qr * qr + qi * qi)
                nv1 = (z * v1 + qd * v2) * cn
                v2 = (zc * v2 - (qr - 1j * qi) * v1) * cn
                v1 = nv1
        else:
            for k in range(n):
                qk = q[k]
                qr = qk.real
                qi = qk.imag
                az2 = qr * qr + qi * qi
                kap = sqrt(L * L + az2)
                ph = kap * dt
                c = cos(ph)
                if kap > 0.0:
                    s = sin(ph) / kap
                else:
                    s = dt
                dl = c - 1j * (L * s)
                nv1 = dl * v1 + (qk * s) * v2
                v2 = ((c + 1j * (L * s)) * v2 - ((qr - 1j * qi) * s) * v1)
                v1 = nv1
        a_out[i] = v1 * (cos(L * span) + 1j * sin(L * span))
        b_out[i] = v2 * (cos(L * tsum) - 1j * sin(L * tsum))
    return a_out, b_out
