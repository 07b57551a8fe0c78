"""Pure-numpy fallback for the equation-of-motion kernel.

Mirrors ``_kernels.pyx`` exactly: same signature, same family codes, same
exceptions.  Selected automatically when the compiled module is missing.
"""
import numpy as np

from .errors import CollisionError, PoleError

# family codes shared with the compiled kernel
CM_RATIONAL = 0
CM_HARMONIC = 1
CS = 2
RS = 3

POLE_TOL = 1e-12


def min_separation(z):
    """Return ``(dmin, i, j)`` over pairs ``i < j``; ``(inf, -1, -1)`` for n < 2."""
    n = z.shape[0]
    if n < 2:
        return np.inf, -1, -1
    d = np.abs(z[:, None] - z[None, :])
    iu = np.triu_indices(n, 1)
    k = int(np.argmin(d[iu]))
    return float(d[iu][k]), int(iu[0][k]), int(iu[1][k])


def _check_pole(den, what):
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError(f"{what} evaluated within {POLE_TOL:g} of a pole")


def pair_f(rs_case, dz, a, r):
    """Interaction function f for RS cases 1..5 on an array of differences."""
    if rs_case == 1:
        _check_pole(dz, "f (case i)")
        return 2.0 / dz
    if rs_case == 2:
        den = dz * (1.0 + r * r * dz * dz)
        _check_pole(den, "f (case ii)")
        return 2.0 / den
    s = np.sinh(a * dz)
    if rs_case == 3:
        _check_pole(s, "f (case iii)")
        return 2.0 * a * np.cosh(a * dz) / s
    if rs_case == 4:
        _check_pole(s, "f (case iv)")
        return 2.0 * a / s
    if rs_case == 5:
        den = s * (1.0 + r * r * s * s)
        _check_pole(den, "f (case v)")
        return 2.0 * a * np.cosh(a * dz) / den
    raise ValueError(f"unknown RS case code {rs_case}")


def accelerations(code, rs_case, z, v, params, eps):
    """Second derivatives of the positions.

    ``params`` is ``(g, lam, a, r, Omega)`` as complex numbers; entries a
    family does not use are ignored.  Raises :class:`CollisionError` when two
    coordinates are closer than ``eps``.
    """
    z = np.asarray(z, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    n = z.shape[0]
    g, lam, a, r, omega = (complex(p) for p in params)
    dmin, i, j = min_separation(z)
    if dmin <= eps:
        raise CollisionError(i, j, dmin)
    acc = np.zeros(n, dtype=np.complex128)
    if n > 1:
        dz = z[:, None] - z[None, :]
        off = ~np.eye(n, dtype=bool)
        dz_off = np.where(off, dz, 1.0)
        if code in (CM_RATIONAL, CM_HARMONIC):
            acc = 2.0 * g * g * np.sum(np.where(off, dz_off ** -3, 0.0), axis=1)
        elif code == CS:
            s = np.sinh(dz_off)
            _check_pole(s, "sinh^-3 force")
            acc = 2.0 * g * g * np.sum(
                np.where(off, np.cosh(dz_off) / s ** 3, 0.0), axis=1)
        elif code == RS:
            f = np.where(off, pair_f(rs_case, dz_off, a, r), 0.0)
            acc = v * (f @ v)
        else:
            raise ValueError(f"unknown family code {code}")
    if code == CM_HARMONIC:
        acc = acc - lam * lam * z
    elif code == RS and omega != 0:
        acc = acc + 1j * omega * v
    return acc
