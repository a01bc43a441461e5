# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise kernels: constrained tensor squares, the quartic bulk
potential and its gradient, and the advective / elastic-stress contractions.

Inputs are flattened (components, npoints) C-contiguous float64 arrays; the
Python wrapper in qsflow.kernels reshapes grid fields.  Single-threaded on
purpose: determinism is part of the package contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# Structure constants tr(Bi Bj Bk) of the orthonormal traceless-symmetric
# basis, copied once at import from the Python-side definition.
from qsflow.tensor import STRUCTURE as _STRUCTURE_PY

cdef double[5][5][5] T
_s = np.ascontiguousarray(_STRUCTURE_PY)
for _i in range(5):
    for _j in range(5):
        for _k in range(5):
            T[_i][_j][_k] = _s[_i, _j, _k]


def traceless_square(double[:, ::1] c):
    """Coefficients of Q^2 - tr(Q^2)/3 I per point; c is (5, n)."""
    cdef Py_ssize_t n = c.shape[1], p, i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((5, n))
    cdef double[:, ::1] o = out
    cdef double acc
    for p in range(n):
        for k in range(5):
            acc = 0.0
            for i in range(5):
                for j in range(5):
                    acc += T[k][i][j] * c[i, p] * c[j, p]
            o[k, p] = acc
    return out


def tr_q3(double[:, ::1] c):
    """tr(Q^3) per point; c is (5, n)."""
    cdef Py_ssize_t n = c.shape[1], p, i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[::1] o = out
    cdef double acc
    for p in range(n):
        acc = 0.0
        for i in range(5):
            for j in range(5):
                for k in range(5):
                    acc += T[i][j][k] * c[i, p] * c[j, p] * c[k, p]
        o[p] = acc
    return out


def bulk_value(double[:, ::1] c, double a, double b, double c4):
    """a/2 |Q|^2 + b/3 tr(Q^3) + c4/4 |Q|^4 per point."""
    cdef Py_ssize_t n = c.shape[1], p, i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[::1] o = out
    cdef double q2, cube
    for p in range(n):
        q2 = 0.0
        for i in range(5):
            q2 += c[i, p] * c[i, p]
        cube = 0.0
        if b != 0.0:
            for i in range(5):
                for j in range(5):
                    for k in range(5):
                        cube += T[i][j][k] * c[i, p] * c[j, p] * c[k, p]
        o[p] = 0.5 * a * q2 + (b / 3.0) * cube + 0.25 * c4 * q2 * q2
    return out


def bulk_gradient(double[:, ::1] c, double a, double b, double c4):
    """a Q + b (Q^2 - tr(Q^2)/3 I) + c4 |Q|^2 Q per point, in coefficients."""
    cdef Py_ssize_t n = c.shape[1], p, i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((5, n))
    cdef double[:, ::1] o = out
    cdef double q2, lin, acc
    for p in range(n):
        q2 = 0.0
        for i in range(5):
            q2 += c[i, p] * c[i, p]
        lin = a + c4 * q2
        for k in range(5):
            acc = lin * c[k, p]
            if b != 0.0:
                for i in range(5):
                    for j in range(5):
                        acc += b * T[k][i][j] * c[i, p] * c[j, p]
            o[k, p] = acc
    return out


def advect(double[:, ::1] v, double[:, :, ::1] grad):
    """(v . grad) f: v is (3, n), grad is (3, ncomp, n); returns (ncomp, n)."""
    cdef Py_ssize_t n = v.shape[1], ncomp = grad.shape[1], p, m
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((ncomp, n))
    cdef double[:, ::1] o = out
    for m in range(ncomp):
        for p in range(n):
            o[m, p] = (v[0, p] * grad[0, m, p] + v[1, p] * grad[1, m, p]
                       + v[2, p] * grad[2, m, p])
    return out


def stress(double[:, :, ::1] grad_q):
    """S_ab = d_a Q : d_b Q; grad_q is (3, 5, n); returns (3, 3, n)."""
    cdef Py_ssize_t n = grad_q.shape[2], ncomp = grad_q.shape[1], p, a, b, m
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out = np.zeros((3, 3, n))
    cdef double[:, :, ::1] o = out
    cdef double acc
    for a in range(3):
        for b in range(a, 3):
            for p in range(n):
                acc = 0.0
                for m in range(ncomp):
                    acc += grad_q[a, m, p] * grad_q[b, m, p]
                o[a, b, p] = acc
            if b != a:
                o[b, a, :] = o[a, b, :]
    return out
