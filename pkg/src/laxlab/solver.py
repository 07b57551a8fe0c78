"""Exact solution machinery: closed-form G evolution and spectral positions.

Projection identities
---------------------
Let ``U`` solve ``dU/dt = -M U`` with ``U(0) = I``.  Then a Lax equation
``dL/dt = [L, M] + k(t) L`` gives ``L = U Lt U^-1`` with
``dLt/dt = k(t) Lt``, and conjugating any matrix ``Y`` whose evolution is
``dY/dt = [Y, M] + (terms in L)`` removes the commutator:
``Yt = U^-1 Y U`` obeys an ODE in which ``M`` no longer appears.
``Y`` and ``Yt`` share eigenvalues, which gives

* CM_RATIONAL: ``dXt/dt = L0``          ->  ``X = X0 + t L0``
* CM_HARMONIC: ``dZt/dt = i lam Zt``, ``dWt/dt = -i lam Wt``
  -> ``X = (exp(i lam t) Z0 - exp(-i lam t) W0) / (2 i lam)``
* CS:          ``dXt/dt = Xt L0 + L0 Xt`` -> ``Xt = e^{t L0} X0 e^{t L0}``
* RS:          ``dXt/dt = a (Xt L0 + L0 Xt)`` -> ``Xt = e^{a t L0} X0 e^{a t L0}``
* RS_PERTURBED: ``Lt = e^{i Omega t} L0``, hence the RS formula with ``t``
  replaced by ``tau(t) = (e^{i Omega t} - 1) / (i Omega)``, which is
  periodic with period ``2 pi / Omega``.

Positions are the eigenvalues of ``X`` (CM) or ``log(eig) / (2 s)`` with
``X = diag(exp(2 s z))`` (CS, RS).  Eigenvalues are tracked from ``t = 0``
along the path so each keeps its particle label, and logarithms are
unwrapped continuously from the known initial positions.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguityError, UnsupportedFamilyError
from .integrate import IntegratorOptions, integrate, solve_ode
from .linalg import companion_matrix, eigenvalues, mat_exp
from .observables import frame, g_rate_scale, linear_evolution_matrix
from .systems import Family, PhaseState, SystemSpec, build_lax

__all__ = [
    "AlgebraicSolution",
    "make_solution",
    "evolve_G",
    "evolve_G_perturbed",
    "tau",
    "spectral_matrix",
    "spectral_positions",
    "period_report",
]


@dataclass(frozen=True)
class AlgebraicSolution:
    """Verbatim ``t = 0`` Lax data for the closed-form solvers."""

    spec: SystemSpec
    s0: PhaseState
    L0: np.ndarray
    X0: np.ndarray
    A_coeffs: np.ndarray
    F0: np.ndarray
    G0: np.ndarray
    F_n: complex
    Z0: np.ndarray | None = None
    W0: np.ndarray | None = None


def make_solution(spec: SystemSpec, s0: PhaseState) -> AlgebraicSolution:
    if not spec.has_lax:
        raise UnsupportedFamilyError(
            f"RS case {spec.rs_case.value} has no Lax matrix")
    lax = build_lax(spec, s0)
    fr = frame(spec, s0)
    return AlgebraicSolution(
        spec=spec, s0=s0, L0=lax.L, X0=lax.X, A_coeffs=np.array(fr.A_coeffs),
        F0=np.array(fr.F), G0=np.array(fr.G), F_n=fr.F_n, Z0=lax.Z, W0=lax.W)


def evolve_G(sol: AlgebraicSolution, t: float) -> np.ndarray:
    """``G(t)`` from the linear law: ``exp(t A) G(0)`` for CS and RS.

    CM_RATIONAL uses the polynomial form ``G_k(t) = G_k(0) + t F_{k+1}`` and
    CM_HARMONIC the phase ``exp(-i lam t)``.
    """
    spec = sol.spec
    fam = spec.family
    if t == 0:
        return sol.G0.copy()
    if fam is Family.CM_RATIONAL:
        F_up = np.append(sol.F0[1:], sol.F_n)
        return sol.G0 + t * F_up
    if fam is Family.CM_HARMONIC:
        return cmath.exp(-1j * spec.lam * t) * sol.G0
    if fam in (Family.CS, Family.RS):
        B = linear_evolution_matrix(spec, sol.A_coeffs)
        return mat_exp(t * B) @ sol.G0
    raise UnsupportedFamilyError(
        f"{fam.value} rotates its coefficients; use evolve_G_perturbed")


def evolve_G_perturbed(sol: AlgebraicSolution, t: float, tol: float = 1e-13):
    """``G(t)`` for RS_PERTURBED by dense stepping of the linear system.

    ``dG/dt = 2a C(t) G + i Omega diag(k) G`` where ``C(t)`` is the companion
    matrix of the rotating coefficients ``A_i(t) = e^{i Omega (n-i) t} A_i(0)``.
    """
    spec = sol.spec
    if spec.family is not Family.RS_PERTURBED:
        raise UnsupportedFamilyError("evolve_G_perturbed needs RS_PERTURBED")
    if t < 0:
        raise ValueError("evolve_G_perturbed integrates forward only")
    if t == 0:
        return sol.G0.copy()
    n = spec.n
    om = spec.Omega
    scale = g_rate_scale(spec)
    powers = n - np.arange(n)
    diag = 1j * om * np.arange(n)

    def rhs(s, G):
        A_t = sol.A_coeffs * np.exp(1j * om * powers * s)
        return companion_matrix(A_t, scale) @ G + diag * G

    atol = tol * max(1.0, float(np.max(np.abs(sol.G0))))
    out = None
    for _, G in solve_ode(rhs, sol.G0, [0.0, float(t)], atol=atol, rtol=tol):
        out = G
    return out


def tau(spec: SystemSpec, t: float) -> complex:
    """Effective flow time: ``t``, or ``(e^{i Omega t} - 1)/(i Omega)`` if perturbed."""
    if spec.family is Family.RS_PERTURBED:
        return (cmath.exp(1j * spec.Omega * t) - 1.0) / (1j * spec.Omega)
    return t


def spectral_matrix(sol: AlgebraicSolution, t: float) -> np.ndarray:
    """Matrix isospectral to ``X(t)``."""
    spec = sol.spec
    fam = spec.family
    if fam is Family.CM_RATIONAL:
        return sol.X0 + t * sol.L0
    if fam is Family.CM_HARMONIC:
        lam = spec.lam
        return (cmath.exp(1j * lam * t) * sol.Z0
                - cmath.exp(-1j * lam * t) * sol.W0) / (2j * lam)
    E = mat_exp(spec.x_scale * tau(spec, t) * sol.L0)
    return E @ sol.X0 @ E


def _match(prev, new):
    """Greedy nearest assignment of ``new`` eigenvalues to ``prev`` labels.

    Returns the reordered values and the largest ratio of an eigenvalue's
    displacement to its distance from the nearest other previous eigenvalue
    (``< 0.25`` means the assignment is unambiguous).
    """
    n = prev.size
    if n == 1:
        return new.copy(), 0.0
    dist = np.abs(prev[:, None] - new[None, :])
    order = np.dstack(np.unravel_index(np.argsort(dist, axis=None), dist.shape))[0]
    out = np.empty(n, dtype=np.complex128)
    used_p = np.zeros(n, dtype=bool)
    used_n = np.zeros(n, dtype=bool)
    for i, j in order:
        if not used_p[i] and not used_n[j]:
            out[i] = new[j]
            used_p[i] = used_n[j] = True
    gaps = np.abs(prev[:, None] - prev[None, :])
    np.fill_diagonal(gaps, np.inf)
    gap = np.min(gaps, axis=1)
    disp = np.abs(out - prev)
    if np.any(gap == 0):
        return out, math.inf
    return out, float(np.max(disp / gap))


def spectral_positions(sol: AlgebraicSolution, t: float, steps_per_unit: int = 32,
                       max_depth: int = 30) -> np.ndarray:
    """Positions at time ``t`` in particle order, by spectral projection.

    The path ``0 -> t`` is split into ``steps_per_unit * |t|`` pieces (at
    least 8); a piece is bisected while eigenvalue matching is ambiguous or a
    logarithm moves by more than ``pi / 2``.  Failure to resolve within
    ``max_depth`` bisections raises :class:`BranchAmbiguityError`.
    """
    spec = sol.spec
    s_scale = spec.x_scale
    z0 = np.array(sol.s0.z, dtype=np.complex128)
    if t == 0:
        return z0
    w0 = np.diag(sol.X0).copy()
    logs = None if s_scale is None else 2.0 * s_scale * z0

    def advance(s_a, w_a, logs_a, s_b, depth):
        w_b, ratio = _match(w_a, eigenvalues(spectral_matrix(sol, s_b)))
        ok = ratio < 0.25
        if ok and logs_a is not None:
            ratio_w = w_b / w_a
            ok = bool(np.all(np.abs(np.angle(ratio_w)) < math.pi / 2))
        if not ok:
            if depth >= max_depth:
                raise BranchAmbiguityError(
                    f"cannot track eigenvalues between t={s_a!r} and t={s_b!r}")
            s_m = 0.5 * (s_a + s_b)
            w_m, logs_m = advance(s_a, w_a, logs_a, s_m, depth + 1)
            return advance(s_m, w_m, logs_m, s_b, depth + 1)
        if logs_a is None:
            return w_b, None
        return w_b, logs_a + np.log(w_b / w_a)

    pieces = max(8, int(math.ceil(abs(t) * steps_per_unit)))
    grid = np.linspace(0.0, float(t), pieces + 1)
    w, lg = w0, logs
    for s_a, s_b in zip(grid[:-1], grid[1:]):
        w, lg = advance(s_a, w, lg, s_b, 0)
    if lg is None:
        return w
    return lg / (2.0 * s_scale)


def period_report(spec: SystemSpec, s0: PhaseState, atol=1e-11, rtol=1e-11,
                  backend=None) -> dict:
    """Oracle test of the all-orbits-periodic property of RS_PERTURBED.

    Integrates to ``T = 2 pi / Omega`` and, for the alternative reading of
    the period, to ``T' = Omega``.
    """
    if spec.family is not Family.RS_PERTURBED:
        raise UnsupportedFamilyError("period_report needs RS_PERTURBED")

    def run(T):
        opts = IntegratorOptions(t_end=T, sample_every=T, atol=atol, rtol=rtol)
        traj = integrate(spec, s0, opts, backend=backend)
        if traj.error is not None:
            return {"error": traj.error}
        first, last = traj.samples[0], traj.samples[-1]
        z0, v0, z1, v1 = first.state.z, first.state.v, last.state.z, last.state.v
        ret = max(float(np.max(np.abs(z1 - z0))), float(np.max(np.abs(v1 - v0))))
        # particles may come back relabelled; then the orbit closes at a multiple of T
        best, perm = ret, tuple(range(spec.n))
        if spec.n <= 6:
            for p in itertools.permutations(range(spec.n)):
                idx = list(p)
                e = max(float(np.max(np.abs(z1[idx] - z0))), float(np.max(np.abs(v1[idx] - v0))))
                if e < best:
                    best, perm = e, p
        rot = None
        if first.frame is not None:
            rot = [float(abs(a - b)) for a, b in zip(last.frame.F, first.frame.F)]
        return {"T": T, "return_error": ret, "per_invariant_rotation_error": rot,
                "relabelled_return_error": best, "relabelling": list(perm)}

    T = 2.0 * math.pi / spec.Omega
    main = run(T)
    alt = run(spec.Omega)
    out = {"T_tested": T}
    out.update({k: v for k, v in main.items() if k != "T"})
    out["alternative"] = {"T": spec.Omega, **{k: v for k, v in alt.items() if k != "T"}}
    return out
