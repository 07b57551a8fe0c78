# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled equation-of-motion kernel.

Same contract as ``laxlab._kernels_py``; pair loops run in C on
``double complex`` values.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sinh, cosh, sin, cos, sqrt, INFINITY

from .errors import CollisionError, PoleError

cnp.import_array()

CM_RATIONAL = 0
CM_HARMONIC = 1
CS = 2
RS = 3

cdef double POLE_TOL = 1e-12


cdef inline double cabs_(double complex w) nogil:
    return sqrt(w.real * w.real + w.imag * w.imag)


cdef inline double complex csinh_(double complex w) nogil:
    return sinh(w.real) * cos(w.imag) + 1j * (cosh(w.real) * sin(w.imag))


cdef inline double complex ccosh_(double complex w) nogil:
    return cosh(w.real) * cos(w.imag) + 1j * (sinh(w.real) * sin(w.imag))


cdef int _pair_f(int rs_case, double complex d, double complex a,
                 double complex r, double complex *out) nogil:
    # returns 1 on pole proximity
    cdef double complex s, den
    if rs_case == 1:
        if cabs_(d) < POLE_TOL:
            return 1
        out[0] = 2.0 / d
        return 0
    if rs_case == 2:
        den = d * (1.0 + r * r * d * d)
        if cabs_(den) < POLE_TOL:
            return 1
        out[0] = 2.0 / den
        return 0
    s = csinh_(a * d)
    if rs_case == 3:
        if cabs_(s) < POLE_TOL:
            return 1
        out[0] = 2.0 * a * ccosh_(a * d) / s
        return 0
    if rs_case == 4:
        if cabs_(s) < POLE_TOL:
            return 1
        out[0] = 2.0 * a / s
        return 0
    den = s * (1.0 + r * r * s * s)
    if cabs_(den) < POLE_TOL:
        return 1
    out[0] = 2.0 * a * ccosh_(a * d) / den
    return 0


cdef double _min_sep(const double complex[::1] zz, Py_ssize_t *bi, Py_ssize_t *bj) noexcept nogil:
    cdef Py_ssize_t n = zz.shape[0], i, j
    cdef double d, best = INFINITY
    bi[0] = -1
    bj[0] = -1
    for i in range(n):
        for j in range(i + 1, n):
            d = cabs_(zz[i] - zz[j])
            if d < best:
                best = d
                bi[0] = i
                bj[0] = j
    return best


def min_separation(z):
    """Return ``(dmin, i, j)`` over pairs ``i < j``; ``(inf, -1, -1)`` for n < 2."""
    cdef const double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t bi, bj
    cdef double best = _min_sep(zz, &bi, &bj)
    return best, bi, bj


def accelerations(int code, int rs_case, z, v, params, double eps):
    """Second derivatives of the positions; see ``_kernels_py.accelerations``."""
    cdef const double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double complex[::1] vv = np.ascontiguousarray(v, dtype=np.complex128)
    cdef const double complex[::1] pp = np.ascontiguousarray(params, dtype=np.complex128)
    cdef Py_ssize_t n = zz.shape[0], i, j
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] acc = out
    cdef double complex g = pp[0], lam = pp[1], a = pp[2], r = pp[3], omega = pp[4]
    cdef double complex d, s, f, tot, gg = 2.0 * g * g
    cdef int bad = 0
    cdef Py_ssize_t bi, bj
    cdef double best = _min_sep(zz, &bi, &bj)
    if best <= eps:
        raise CollisionError(bi, bj, best)

    if code == CM_RATIONAL or code == CM_HARMONIC:
        for i in range(n):
            tot = 0
            for j in range(n):
                if j != i:
                    d = zz[i] - zz[j]
                    tot = tot + 1.0 / (d * d * d)
            acc[i] = gg * tot
            if code == CM_HARMONIC:
                acc[i] = acc[i] - lam * lam * zz[i]
    elif code == CS:
        for i in range(n):
            tot = 0
            for j in range(n):
                if j != i:
                    d = zz[i] - zz[j]
                    s = csinh_(d)
                    if cabs_(s) < POLE_TOL:
                        bad = 1
                        break
                    tot = tot + ccosh_(d) / (s * s * s)
            if bad:
                break
            acc[i] = gg * tot
        if bad:
            raise PoleError(f"sinh^-3 force evaluated within {POLE_TOL:g} of a pole")
    elif code == RS:
        if rs_case < 1 or rs_case > 5:
            raise ValueError(f"unknown RS case code {rs_case}")
        for i in range(n):
            tot = 0
            for j in range(n):
                if j != i:
                    if _pair_f(rs_case, zz[i] - zz[j], a, r, &f):
                        bad = 1
                        break
                    tot = tot + f * vv[j]
            if bad:
                break
            acc[i] = vv[i] * tot
            if omega != 0:
                acc[i] = acc[i] + 1j * omega * vv[i]
        if bad:
            raise PoleError(f"f (case code {rs_case}) evaluated within {POLE_TOL:g} of a pole")
    else:
        raise ValueError(f"unknown family code {code}")
    return out
