# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled J0/J1/Y0/Y1 evaluation; same three-regime scheme as _specfun_py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, cos, sin, fabs, M_PI, pow

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double SERIES_MAX = 2.0
cdef double ASYMPTOTIC_MIN = 25.0


cdef void _series(double x, double* out) noexcept nogil:
    cdef double q = 0.25 * x * x
    cdef double lg = log(0.5 * x) + EULER_GAMMA
    cdef double j0 = 0.0, j1 = 0.0, s0 = 0.0, s1 = 0.0
    cdef double t0 = 1.0, t1 = 1.0, hk = 0.0
    cdef int k
    for k in range(30):
        if k > 0:
            t0 = t0 * (-q) / (k * k)
            t1 = t1 * (-q) / (k * (k + 1.0))
            hk += 1.0 / k
        j0 += t0
        j1 += t1
        s0 -= hk * t0
        s1 += (2.0 * hk + 1.0 / (k + 1.0)) * t1
        if fabs(t0) < 1e-18 and k > 2:
            break
    j1 *= 0.5 * x
    out[0] = j0
    out[1] = j1
    out[2] = (2.0 / M_PI) * (lg * j0 + s0)
    out[3] = -2.0 / (M_PI * x) + (2.0 / M_PI) * lg * j1 - (0.5 * x / M_PI) * s1


cdef void _miller(double x, double* out) noexcept nogil:
    cdef int n = <int>(x + 9.0 * pow(x, 1.0 / 3.0) + 30.0)
    n += n % 2
    cdef double jp1 = 0.0, jk = 1e-30, jm1
    cdef double norm = 0.0, ysum0 = 0.0, ysum1 = 0.0, j_odd_above = 0.0
    cdef double j1 = 0.0, sgn, two_over_x = 2.0 / x
    cdef int k, m
    for k in range(n, 0, -1):
        jm1 = k * two_over_x * jk - jp1
        if k % 2 == 0:
            m = k // 2
            sgn = -1.0 if m % 2 else 1.0
            norm += 2.0 * jk
            ysum0 += sgn * jk / m
            ysum1 += sgn * (jm1 - j_odd_above) / m
        else:
            j_odd_above = jk
        if k == 1:
            j1 = jk
        jp1 = jk
        jk = jm1
        if fabs(jk) > 1e250:
            jp1 *= 1e-250
            jk *= 1e-250
            norm *= 1e-250
            ysum0 *= 1e-250
            ysum1 *= 1e-250
            j_odd_above *= 1e-250
            j1 *= 1e-250
    norm += jk
    cdef double j0 = jk / norm
    j1 /= norm
    ysum0 /= norm
    ysum1 /= norm
    cdef double lg = log(0.5 * x) + EULER_GAMMA
    out[0] = j0
    out[1] = j1
    out[2] = (2.0 / M_PI) * (lg * j0 - 2.0 * ysum0)
    out[3] = (2.0 / M_PI) * (-j0 / x + lg * j1 + ysum1)


cdef void _asymptotic(double x, double* out) noexcept nogil:
    cdef int nu, k
    cdef double mu, sre, sim, tre, tim, c, mag, prev, phase, amp, ntre
    amp = sqrt(2.0 / (M_PI * x))
    for nu in range(2):
        mu = 4.0 * nu * nu
        sre = 1.0
        sim = 0.0
        tre = 1.0
        tim = 0.0
        prev = 1e300
        for k in range(1, 60):
            # term *= 1j * c
            c = (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
            ntre = -tim * c
            tim = tre * c
            tre = ntre
            mag = sqrt(tre * tre + tim * tim)
            if mag >= prev:
                break
            sre += tre
            sim += tim
            prev = mag
            if mag < 1e-17:
                break
        phase = x - (0.5 * nu + 0.25) * M_PI
        # h = amp * exp(i phase) * s
        out[nu] = amp * (cos(phase) * sre - sin(phase) * sim)
        out[2 + nu] = amp * (sin(phase) * sre + cos(phase) * sim)


cdef inline void _eval(double x, double* out) noexcept nogil:
    if x <= SERIES_MAX:
        _series(x, out)
    elif x > ASYMPTOTIC_MIN:
        _asymptotic(x, out)
    else:
        _miller(x, out)


def bessel01(x):
    """Return ``(J0, J1, Y0, Y1)`` at ``x`` (array, all entries > 0)."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = arr.ravel()
    cdef Py_ssize_t n = xv.shape[0], i
    res = np.empty((4, n), dtype=np.float64)
    cdef double[:, ::1] rv = res
    cdef double buf[4]
    with nogil:
        for i in range(n):
            _eval(xv[i], buf)
            rv[0, i] = buf[0]
            rv[1, i] = buf[1]
            rv[2, i] = buf[2]
            rv[3, i] = buf[3]
    return tuple(res[j].reshape(shape) for j in range(4))


def bessel_j01(x):
    """Return ``(J0, J1)``; valid for ``x >= 0``."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = arr.ravel()
    cdef Py_ssize_t n = xv.shape[0], i
    res = np.empty((2, n), dtype=np.float64)
    cdef double[:, ::1] rv = res
    cdef double buf[4]
    with nogil:
        for i in range(n):
            if xv[i] == 0.0:
                rv[0, i] = 1.0
                rv[1, i] = 0.0
            else:
                _eval(xv[i], buf)
                rv[0, i] = buf[0]
                rv[1, i] = buf[1]
    return res[0].reshape(shape), res[1].reshape(shape)
