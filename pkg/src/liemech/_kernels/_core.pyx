# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: structure-constant contractions and SO(3)/SE(3)
exponential/logarithm maps (single and batched).

API mirrors _numpy_core; the package falls back to that module when this
extension is not built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt

cnp.import_array()

DEF CUT_LOCUS_MARGIN = 1e-6
cdef double PI = 3.141592653589793238462643383279502884


def sc_bracket(double[:, :, ::1] c, double[::1] x, double[::1] y):
    cdef Py_ssize_t d = c.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(d)
    cdef double[::1] z = out
    cdef Py_ssize_t i, j, k
    cdef double acc, xi
    for k in range(d):
        acc = 0.0
        for i in range(d):
            xi = x[i]
            if xi == 0.0:
                continue
            for j in range(d):
                acc += c[k, i, j] * xi * y[j]
        z[k] = acc
    return out


def sc_ad(double[:, :, ::1] c, double[::1] x):
    cdef Py_ssize_t d = c.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((d, d))
    cdef double[:, ::1] M = out
    cdef Py_ssize_t i, j, k
    cdef double xi
    for i in range(d):
        xi = x[i]
        if xi == 0.0:
            continue
        for k in range(d):
            for j in range(d):
                M[k, j] += c[k, i, j] * xi
    return out


def sc_ad_star(double[:, :, ::1] c, double[::1] x, double[::1] mu):
    cdef Py_ssize_t d = c.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(d)
    cdef double[::1] nu = out
    cdef Py_ssize_t i, j, k
    cdef double acc
    for j in range(d):
        acc = 0.0
        for k in range(d):
            for i in range(d):
                acc += c[k, i, j] * x[i] * mu[k]
        nu[j] = acc
    return out


cdef inline void _hat3(double wx, double wy, double wz, double[:, ::1] K):
    K[0, 0] = 0.0;  K[0, 1] = -wz; K[0, 2] = wy
    K[1, 0] = wz;   K[1, 1] = 0.0; K[1, 2] = -wx
    K[2, 0] = -wy;  K[2, 1] = wx;  K[2, 2] = 0.0


def so3_hat(double[::1] w):
    cdef cnp.ndarray[double, ndim=2] out = np.empty((3, 3))
    _hat3(w[0], w[1], w[2], out)
    return out


cdef inline void _exp3(double wx, double wy, double wz, double[:, ::1] R):
    cdef double theta = sqrt(wx * wx + wy * wy + wz * wz)
    cdef double a, b
    if theta < 1e-8:
        a = 1.0 - theta * theta / 6.0
        b = 0.5 - theta * theta / 24.0
    else:
        a = sin(theta) / theta
        b = (1.0 - cos(theta)) / (theta * theta)
    # I + a*K + b*K^2 written out elementwise
    R[0, 0] = 1.0 + b * (-wy * wy - wz * wz)
    R[0, 1] = -a * wz + b * wx * wy
    R[0, 2] = a * wy + b * wx * wz
    R[1, 0] = a * wz + b * wx * wy
    R[1, 1] = 1.0 + b * (-wx * wx - wz * wz)
    R[1, 2] = -a * wx + b * wy * wz
    R[2, 0] = -a * wy + b * wx * wz
    R[2, 1] = a * wx + b * wy * wz
    R[2, 2] = 1.0 + b * (-wx * wx - wy * wy)


def so3_exp(double[::1] w):
    cdef cnp.ndarray[double, ndim=2] out = np.empty((3, 3))
    _exp3(w[0], w[1], w[2], out)
    return out


cdef inline int _log3(double[:, :] R, double* wx, double* wy, double* wz) except -1:
    cdef double vx = 0.5 * (R[2, 1] - R[1, 2])
    cdef double vy = 0.5 * (R[0, 2] - R[2, 0])
    cdef double vz = 0.5 * (R[1, 0] - R[0, 1])
    cdef double s = sqrt(vx * vx + vy * vy + vz * vz)
    cdef double c = 0.5 * (R[0, 0] + R[1, 1] + R[2, 2] - 1.0)
    cdef double theta = atan2(s, c)
    cdef double f
    if theta >= PI - CUT_LOCUS_MARGIN:
        raise ValueError("cut locus: rotation angle too close to pi")
    if theta < 1e-6:
        f = 1.0 + theta * theta / 6.0
    else:
        f = theta / s
    wx[0] = f * vx
    wy[0] = f * vy
    wz[0] = f * vz
    return 0


def so3_log(double[:, :] R):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(3)
    cdef double wx, wy, wz
    _log3(R, &wx, &wy, &wz)
    out[0] = wx; out[1] = wy; out[2] = wz
    return out


def so3_exp_batch(double[:, ::1] W):
    cdef Py_ssize_t n = W.shape[0]
    cdef cnp.ndarray[double, ndim=3] out = np.empty((n, 3, 3))
    cdef double[:, :, ::1] R = out
    cdef Py_ssize_t i
    for i in range(n):
        _exp3(W[i, 0], W[i, 1], W[i, 2], R[i])
    return out


def so3_log_batch(double[:, :, :] R):
    cdef Py_ssize_t n = R.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, 3))
    cdef double[:, ::1] W = out
    cdef Py_ssize_t i
    cdef double wx, wy, wz
    for i in range(n):
        _log3(R[i], &wx, &wy, &wz)
        W[i, 0] = wx; W[i, 1] = wy; W[i, 2] = wz
    return out


cdef inline void _jac3(double wx, double wy, double wz, bint inverse, double[:, ::1] V):
    """Left Jacobian of SO(3) (or its inverse) as a 3x3 matrix."""
    cdef double theta = sqrt(wx * wx + wy * wy + wz * wz)
    cdef double p, q
    if inverse:
        p = -0.5
        if theta < 1e-6:
            q = 1.0 / 12.0 + theta * theta / 720.0
        else:
            q = (1.0 - 0.5 * theta * sin(theta) / (1.0 - cos(theta))) / (theta * theta)
    else:
        if theta < 1e-6:
            p = 0.5 - theta * theta / 24.0
            q = 1.0 / 6.0 - theta * theta / 120.0
        else:
            p = (1.0 - cos(theta)) / (theta * theta)
            q = (theta - sin(theta)) / (theta * theta * theta)
    V[0, 0] = 1.0 + q * (-wy * wy - wz * wz)
    V[0, 1] = -p * wz + q * wx * wy
    V[0, 2] = p * wy + q * wx * wz
    V[1, 0] = p * wz + q * wx * wy
    V[1, 1] = 1.0 + q * (-wx * wx - wz * wz)
    V[1, 2] = -p * wx + q * wy * wz
    V[2, 0] = -p * wy + q * wx * wz
    V[2, 1] = p * wx + q * wy * wz
    V[2, 2] = 1.0 + q * (-wx * wx - wy * wy)


def se3_exp(double[::1] x):
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((4, 4))
    cdef double[:, ::1] H = out
    cdef double V[3][3]
    cdef double[:, ::1] Vv = <double[:3, :3]>&V[0][0]
    _exp3(x[0], x[1], x[2], H[:3, :3])
    _jac3(x[0], x[1], x[2], False, Vv)
    cdef Py_ssize_t i, j
    for i in range(3):
        for j in range(3):
            H[i, 3] += V[i][j] * x[3 + j]
    H[3, 3] = 1.0
    return out


def se3_log(double[:, :] H):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(6)
    cdef double wx, wy, wz
    _log3(H[:3, :3], &wx, &wy, &wz)
    cdef double V[3][3]
    cdef double[:, ::1] Vv = <double[:3, :3]>&V[0][0]
    _jac3(wx, wy, wz, True, Vv)
    out[0] = wx; out[1] = wy; out[2] = wz
    cdef Py_ssize_t i, j
    for i in range(3):
        out[3 + i] = 0.0
        for j in range(3):
            out[3 + i] += V[i][j] * H[j, 3]
    return out
