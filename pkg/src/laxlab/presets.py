"""Documented initial conditions used by the sample configs, checks and tests.

Each preset returns ``(spec, state)``.  The states are generic (no special
symmetry) and collision-free over the horizons the acceptance suite uses.
"""
from __future__ import annotations

from .systems import PhaseState, SystemSpec

__all__ = ["PRESETS", "preset"]

Z4 = (-1.5, -0.4, 0.6, 1.8)
Z3 = (-1.1, 0.2, 1.4)


def cm_rational(n=4):
    """Rational CM, ``g = 1``."""
    ys = {2: (0.3, -0.2), 3: (0.4, -0.3, 0.2), 4: (0.3, -0.2, 0.5, -0.1)}[n]
    zs = {2: (-0.7, 0.8), 3: Z3, 4: Z4}[n]
    return SystemSpec("CM_RATIONAL", n, g=1.0), PhaseState(0.0, zs, ys)


def cm_harmonic(n=3):
    spec = SystemSpec("CM_HARMONIC", n, g=1.0, lam=1.0)
    zs = {2: (-0.7, 0.8), 3: Z3}[n]
    ys = {2: (0.3, -0.2), 3: (0.4, -0.3, 0.2)}[n]
    return spec, PhaseState(0.0, zs, ys)


def cs(n=4):
    """Hyperbolic pair potential, ``g = 0.7``."""
    zs = {2: (-0.7, 0.8), 3: Z3, 4: Z4}[n]
    ys = {2: (0.5, 0.4), 3: (0.4, -0.3, 0.2), 4: (0.5, 0.4, 0.7, 0.6)}[n]
    return SystemSpec("CS", n, g=0.7), PhaseState(0.0, zs, ys)


def rs(n=4):
    """Hyperbolic RS (case v), ``a = 1``, ``r = 0.8``."""
    zs = {2: (-0.7, 0.8), 3: Z3, 4: Z4}[n]
    vs = {2: (0.5, 0.4), 3: (0.5, 0.8, 0.6), 4: (0.5, 0.4, 0.7, 0.6)}[n]
    return SystemSpec("RS", n, a=1.0, r=0.8, rs_case="v"), PhaseState(0.0, zs, vs)


def rs_perturbed(n=2):
    """Perturbed RS (case v), ``Omega = 1``.

    Velocities are small enough that every particle returns to itself after
    one period ``2 pi / Omega``; larger velocities can exchange particles
    and double the period.
    """
    zs = {2: (-0.5, 0.5), 3: Z3}[n]
    vs = {2: (0.3, 0.2), 3: (0.2, 0.3, 0.25)}[n]
    spec = SystemSpec("RS_PERTURBED", n, a=1.0, r=0.8, rs_case="v", Omega=1.0)
    return spec, PhaseState(0.0, zs, vs)


PRESETS = {
    "cm": cm_rational,
    "cmh": cm_harmonic,
    "cs": cs,
    "rs": rs,
    "rsp": rs_perturbed,
}


def preset(name, n=None):
    fn = PRESETS[name]
    return fn() if n is None else fn(n)
