"""Linearizing functionals ``F_k``, ``G_k``, superintegrals and their rates.

For every Lax family ``F_k = tr(L**k)`` and ``G_k = tr(X L**k)``,
``k = 0..n-1``; CM_HARMONIC instead uses ``F_k = tr(Z P**k)`` and
``G_k = tr(W P**k)``.  The evolution laws implemented by
:func:`predicted_rates` are

============  ==================  =================================
family        dF_k/dt             dG_k/dt
============  ==================  =================================
CM_RATIONAL   0                   F_{k+1}
CM_HARMONIC   i lam F_k           -i lam G_k
CS            0                   2 G_{k+1}
RS            0                   2 a G_{k+1}
RS_PERTURBED  i Omega k F_k       2 a G_{k+1} + i Omega k G_k
============  ==================  =================================

where ``F_n`` and ``G_n`` are closed with the Cayley-Hamilton coefficients.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedFamilyError
from .linalg import char_poly, companion_matrix
from .systems import Family, PhaseState, SystemSpec, build_lax

__all__ = [
    "ObservableFrame",
    "CompanionMatrix",
    "frame",
    "superintegrals",
    "companion",
    "g_rate_scale",
    "predicted_rates",
    "linear_evolution_matrix",
    "invariant_phase",
]


@dataclass(frozen=True)
class ObservableFrame:
    """Observables at one phase point.

    ``F_n`` and ``G_n`` are the directly computed next traces (not part of
    the linearizing coordinates, kept for closure checks).
    """

    t: float
    F: tuple
    G: tuple
    H: tuple
    A_coeffs: np.ndarray
    F_n: complex
    G_n: complex

    @property
    def n(self):
        return len(self.F)


@dataclass(frozen=True)
class CompanionMatrix:
    A: np.ndarray
    scale: complex


def frame(spec: SystemSpec, s: PhaseState) -> ObservableFrame:
    lax = build_lax(spec, s)
    n = spec.n
    if spec.family is Family.CM_HARMONIC:
        base, left, right = lax.P, lax.Z, lax.W
    else:
        base, left, right = lax.L, None, lax.X
    F = []
    G = []
    power = np.eye(n, dtype=np.complex128)
    for k in range(n + 1):
        if left is None:
            F.append(complex(n) if k == 0 else complex(np.trace(power)))
        else:
            F.append(complex(np.trace(left @ power)))
        G.append(complex(np.trace(right @ power)))
        power = power @ base
    A = char_poly(base)
    A.flags.writeable = False
    return ObservableFrame(
        t=s.t, F=tuple(F[:n]), G=tuple(G[:n]),
        H=tuple(superintegrals(F, G[:n])), A_coeffs=A, F_n=F[n], G_n=G[n])


def superintegrals(F, G):
    """``H_k = F_k G_k - F_{k+1} G_{k-1}`` for ``k = 1..n-1``, ``n = len(G)``.

    ``F`` must carry at least ``n + 1`` entries; ``F_n`` may come from the
    Cayley-Hamilton closure.
    """
    n = len(G)
    if len(F) < n + 1 and n > 1:
        raise ValueError(f"need F_0..F_{n}, got {len(F)} entries")
    return [F[k] * G[k] - F[k + 1] * G[k - 1] for k in range(1, n)]


def g_rate_scale(spec: SystemSpec) -> complex:
    """Prefactor of ``G_{k+1}`` in ``dG_k/dt``: 1 (CM), 2 (CS), 2a (RS)."""
    if spec.family in (Family.CM_RATIONAL, Family.CM_HARMONIC):
        return 1.0
    if spec.family is Family.CS:
        return 2.0
    return 2.0 * spec.rs_lax_params()[0]


def companion(spec: SystemSpec, A_coeffs, scale=None) -> CompanionMatrix:
    if scale is None:
        scale = g_rate_scale(spec)
    return CompanionMatrix(A=companion_matrix(A_coeffs, scale), scale=complex(scale))


def _closure(A_coeffs, values):
    return complex(np.dot(A_coeffs, values))


def predicted_rates(spec: SystemSpec, fr: ObservableFrame):
    """``(dF, dG)`` predicted by the linear evolution laws at ``fr``."""
    if not spec.has_lax:
        raise UnsupportedFamilyError(
            f"RS case {spec.rs_case.value} has no linearizing functionals")
    n = fr.n
    F = np.array(fr.F)
    G = np.array(fr.G)
    F_up = np.append(F[1:], _closure(fr.A_coeffs, F))
    G_up = np.append(G[1:], _closure(fr.A_coeffs, G))
    k = np.arange(n)
    fam = spec.family
    if fam is Family.CM_RATIONAL:
        return np.zeros(n, dtype=np.complex128), F_up
    if fam is Family.CM_HARMONIC:
        return 1j * spec.lam * F, -1j * spec.lam * G
    dG = g_rate_scale(spec) * G_up
    if fam is Family.RS_PERTURBED:
        return 1j * spec.Omega * k * F, dG + 1j * spec.Omega * k * G
    return np.zeros(n, dtype=np.complex128), dG


def linear_evolution_matrix(spec: SystemSpec, A_coeffs, with_perturbation=True):
    """Generator ``B`` of ``dG/dt = B G`` at frozen conserved coefficients.

    For RS_PERTURBED the coefficients rotate in time, so the returned matrix
    is only the instantaneous generator.
    """
    if spec.family not in (Family.CS, Family.RS, Family.RS_PERTURBED):
        raise UnsupportedFamilyError(
            f"{spec.family.value} has no closed companion evolution for G")
    B = companion(spec, A_coeffs).A
    if spec.family is Family.RS_PERTURBED and with_perturbation:
        B = B + np.diag(1j * spec.Omega * np.arange(spec.n))
    return B


def invariant_phase(spec: SystemSpec, k: int, t: float) -> complex:
    """Factor ``F_k(t) / F_k(0)`` implied by the evolution law."""
    if spec.family is Family.CM_HARMONIC:
        return cmath.exp(1j * spec.lam * t)
    if spec.family is Family.RS_PERTURBED:
        return cmath.exp(1j * spec.Omega * k * t)
    return 1.0
