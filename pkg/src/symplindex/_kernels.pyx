# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: P1 index-form assembly and Gauss collocation propagation."""

import numpy as np

cimport cython
from libc.math cimport sqrt
from libc.stdlib cimport free, malloc


cdef double complex _conj(double complex z) nogil:
    return z.real - 1j * z.imag


def assemble_p1(p, q, r, double h):
    """Block-tridiagonal stiffness of a first-order index form on hat functions."""
    cdef double complex[:, :, :, ::1] pv = np.ascontiguousarray(p, dtype=np.complex128)
    cdef double complex[:, :, :, ::1] qv = np.ascontiguousarray(q, dtype=np.complex128)
    cdef double complex[:, :, :, ::1] rv = np.ascontiguousarray(r, dtype=np.complex128)
    cdef Py_ssize_t ne = pv.shape[0], n = pv.shape[2]
    diag_arr = np.zeros((ne + 1, n, n), dtype=np.complex128)
    upper_arr = np.zeros((ne, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] diag = diag_arr
    cdef double complex[:, :, ::1] upper = upper_arr
    cdef double xs[3]
    cdef double ws[3]
    cdef double phi[2][3]
    cdef double dphi[2]
    cdef Py_ssize_t e, g, i, j
    cdef double w
    cdef double complex pij, qij, qhij, rij
    xs[0] = -sqrt(0.6)
    xs[1] = 0.0
    xs[2] = sqrt(0.6)
    ws[0] = 5.0 / 9.0 * 0.5 * h
    ws[1] = 8.0 / 9.0 * 0.5 * h
    ws[2] = 5.0 / 9.0 * 0.5 * h
    for g in range(3):
        phi[0][g] = 0.5 * (1.0 - xs[g])
        phi[1][g] = 0.5 * (1.0 + xs[g])
    dphi[0] = -1.0 / h
    dphi[1] = 1.0 / h
    with nogil:
        for e in range(ne):
            for g in range(3):
                w = ws[g]
                for i in range(n):
                    for j in range(n):
                        pij = pv[e, g, i, j]
                        qij = qv[e, g, i, j]
                        qhij = _conj(qv[e, g, j, i])
                        rij = rv[e, g, i, j]
                        diag[e, i, j] += w * (dphi[0] * dphi[0] * pij + dphi[0] * phi[0][g] * qij
                                              + phi[0][g] * dphi[0] * qhij + phi[0][g] * phi[0][g] * rij)
                        diag[e + 1, i, j] += w * (dphi[1] * dphi[1] * pij + dphi[1] * phi[1][g] * qij
                                                  + phi[1][g] * dphi[1] * qhij + phi[1][g] * phi[1][g] * rij)
                        upper[e, i, j] += w * (dphi[0] * dphi[1] * pij + dphi[0] * phi[1][g] * qij
                                               + phi[0][g] * dphi[1] * qhij + phi[0][g] * phi[1][g] * rij)
    return diag_arr, upper_arr


cdef int _solve(double complex* a, double complex* b, Py_ssize_t m, Py_ssize_t cols) nogil:
    """Gaussian elimination with partial pivoting; ``a`` is m x m, ``b`` is m x cols, row major."""
    cdef Py_ssize_t i, j, k, piv
    cdef double best, mag
    cdef double complex f, tmp
    for k in range(m):
        piv = k
        best = abs(a[k * m + k])
        for i in range(k + 1, m):
            mag = abs(a[i * m + k])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return -1
        if piv != k:
            for j in range(m):
                tmp = a[k * m + j]
                a[k * m + j] = a[piv * m + j]
                a[piv * m + j] = tmp
            for j in range(cols):
                tmp = b[k * cols + j]
                b[k * cols + j] = b[piv * cols + j]
                b[piv * cols + j] = tmp
        for i in range(k + 1, m):
            f = a[i * m + k] / a[k * m + k]
            if f == 0:
                continue
            for j in range(k, m):
                a[i * m + j] -= f * a[k * m + j]
            for j in range(cols):
                b[i * cols + j] -= f * b[k * cols + j]
    for k in range(m - 1, -1, -1):
        for j in range(cols):
            tmp = b[k * cols + j]
            for i in range(k + 1, m):
                tmp -= a[k * m + i] * b[i * cols + j]
            b[k * cols + j] = tmp / a[k * m + k]
    return 0


cdef void _matmul(double complex* x, double complex* y, double complex* out, Py_ssize_t d) nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex s
    for i in range(d):
        for j in range(d):
            s = 0
            for k in range(d):
                s += x[i * d + k] * y[k * d + j]
            out[i * d + j] = s


def gl2_propagate(a1, a2, double h, omega, int project_every, int record_every):
    """Propagate ``U' = A(t) U`` from the identity with two-stage Gauss collocation."""
    cdef double complex[:, :, ::1] av1 = np.ascontiguousarray(a1, dtype=np.complex128)
    cdef double complex[:, :, ::1] av2 = np.ascontiguousarray(a2, dtype=np.complex128)
    om_arr = np.ascontiguousarray(omega, dtype=np.complex128)
    cdef double complex[:, ::1] om = om_arr
    cdef double complex[:, ::1] om_inv = np.ascontiguousarray(np.linalg.inv(om_arr))
    cdef Py_ssize_t steps = av1.shape[0], d = av1.shape[1], m = 2 * d
    cdef Py_ssize_t n_rec = steps // record_every + 1
    out_arr = np.zeros((n_rec, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef double s3 = sqrt(3.0) / 6.0
    cdef double c11 = 0.25, c12 = 0.25 - s3, c21 = 0.25 + s3, c22 = 0.25
    cdef double complex* sysm = <double complex*> malloc(m * m * sizeof(double complex))
    cdef double complex* rhs = <double complex*> malloc(m * d * sizeof(double complex))
    cdef double complex* u = <double complex*> malloc(d * d * sizeof(double complex))
    cdef double complex* s = <double complex*> malloc(d * d * sizeof(double complex))
    cdef double complex* tmp = <double complex*> malloc(d * d * sizeof(double complex))
    cdef double complex* tmp2 = <double complex*> malloc(d * d * sizeof(double complex))
    cdef Py_ssize_t i, j, k, l, rec = 1
    cdef double complex acc
    cdef int status = 0
    if sysm == NULL or rhs == NULL or u == NULL or s == NULL or tmp == NULL or tmp2 == NULL:
        free(sysm); free(rhs); free(u); free(s); free(tmp); free(tmp2)
        raise MemoryError()
    try:
        with nogil:
            for j in range(d * d):
                u[j] = 0
            for j in range(d):
                u[j * d + j] = 1
                out[0, j, j] = 1
            for i in range(steps):
                for j in range(d):
                    for k in range(d):
                        sysm[j * m + k] = -h * c11 * av1[i, j, k]
                        sysm[j * m + d + k] = -h * c12 * av1[i, j, k]
                        sysm[(d + j) * m + k] = -h * c21 * av2[i, j, k]
                        sysm[(d + j) * m + d + k] = -h * c22 * av2[i, j, k]
                        rhs[j * d + k] = av1[i, j, k]
                        rhs[(d + j) * d + k] = av2[i, j, k]
                    sysm[j * m + j] += 1
                    sysm[(d + j) * m + d + j] += 1
                if _solve(sysm, rhs, m, d) != 0:
                    status = -1
                    break
                for j in range(d):
                    for k in range(d):
                        s[j * d + k] = 0.5 * h * (rhs[j * d + k] + rhs[(d + j) * d + k])
                    s[j * d + j] += 1
                _matmul(s, u, tmp, d)
                for j in range(d * d):
                    u[j] = tmp[j]
                if project_every > 0 and (i + 1) % project_every == 0:
                    # err = U^H om U - om, correction U (I - om^-1 err / 2)
                    for j in range(d):
                        for k in range(d):
                            acc = 0
                            for l in range(d):
                                acc += om[j, l] * u[l * d + k]
                            tmp[j * d + k] = acc
                    for j in range(d):
                        for k in range(d):
                            acc = 0
                            for l in range(d):
                                acc += _conj(u[l * d + j]) * tmp[l * d + k]
                            tmp2[j * d + k] = acc - om[j, k]
                    for j in range(d):
                        for k in range(d):
                            acc = 0
                            for l in range(d):
                                acc += om_inv[j, l] * tmp2[l * d + k]
                            s[j * d + k] = -0.5 * acc
                        s[j * d + j] += 1
                    _matmul(u, s, tmp, d)
                    for j in range(d * d):
                        u[j] = tmp[j]
                if (i + 1) % record_every == 0:
                    for j in range(d):
                        for k in range(d):
                            out[rec, j, k] = u[j * d + k]
                    rec += 1
    finally:
        free(sysm); free(rhs); free(u); free(s); free(tmp); free(tmp2)
    if status != 0:
        raise np.linalg.LinAlgError("singular collocation system")
    return out_arr
