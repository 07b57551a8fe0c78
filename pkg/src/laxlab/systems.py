"""The five system families: parameters, equations of motion, Lax data.

Families
--------
CM_RATIONAL
    ``H = 1/2 sum y_i**2 + g**2 sum_{i<j} (x_i - x_j)**-2``.
CM_HARMONIC
    The same plus ``lam**2 / 2 * sum x_i**2``.
CS
    ``H = 1/2 sum y_i**2 + g**2 sum_{i<j} sinh(x_i - x_j)**-2``.
RS
    ``zdd_j = sum_{k != j} zd_j zd_k f(z_j - z_k)`` with ``f`` chosen by
    ``rs_case`` (``i`` .. ``v``).
RS_PERTURBED
    ``zdd_j = i Omega zd_j + sum_{k != j} zd_j zd_k f(z_j - z_k)``, which is
    the form whose Lax matrix obeys ``Ldot = [L, M] + i Omega L``.

Lax matrices are only available for the hyperbolic RS cases (iii, iv, v).
They are all expressed through ``c = coth(a mu)``::

    alpha(z) = 1 / (cosh(a z) + c sinh(a z))
    beta(z)  = -a c alpha(z) alpha(-z)
    gamma(z) = -a coth(a z) alpha(z)

Case v uses the given ``a`` and ``mu = arcsinh(i / r) / a``.  Case iii is
the ``r -> 0`` limit (``c = 1``).  Case iv is case v at half the scale with
``r = 1`` (``c = 0``), since ``2a / sinh(a z)`` equals the case v force at
``a/2, r = 1``; its ``X`` is therefore ``diag(exp(a z_j))``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from ._kernels_py import POLE_TOL, min_separation, pair_f
from .errors import CollisionError, PoleError, UnsupportedFamilyError
from .linalg import anticommutator, commutator, max_norm

__all__ = [
    "Family",
    "RSCase",
    "SystemSpec",
    "PhaseState",
    "LaxData",
    "interaction_f",
    "eom_rhs",
    "build_lax",
    "lax_derivatives",
    "lax_residuals",
    "hamiltonian",
]


class Family(str, Enum):
    CM_RATIONAL = "CM_RATIONAL"
    CM_HARMONIC = "CM_HARMONIC"
    CS = "CS"
    RS = "RS"
    RS_PERTURBED = "RS_PERTURBED"


class RSCase(str, Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"
    V = "v"


_CASE_CODE = {RSCase.I: 1, RSCase.II: 2, RSCase.III: 3, RSCase.IV: 4, RSCase.V: 5}

_RS_CASE_PARAMS = {
    RSCase.I: set(),
    RSCase.II: {"r"},
    RSCase.III: {"a"},
    RSCase.IV: {"a"},
    RSCase.V: {"a", "r"},
}

_OPTIONAL = {"g", "lam", "a", "r", "mu", "Omega"}


def _required_params(family, rs_case):
    if family is Family.CM_RATIONAL or family is Family.CS:
        return {"g"}
    if family is Family.CM_HARMONIC:
        return {"g", "lam"}
    req = set(_RS_CASE_PARAMS[rs_case])
    if family is Family.RS_PERTURBED:
        req.add("Omega")
    return req


@dataclass(frozen=True)
class SystemSpec:
    """Family selector plus every physical parameter the family uses.

    Parameters a family does not use must be left as ``None``; passing one
    raises ``ValueError`` rather than being silently ignored.  For RS case v
    ``mu`` is derived from ``r`` (principal ``arcsinh``) when omitted, and
    checked against ``sinh(a mu) = i / r`` when given.
    """

    family: Family
    n: int
    g: complex | None = None
    lam: complex | None = None
    a: complex | None = None
    r: complex | None = None
    mu: complex | None = None
    Omega: float | None = None
    rs_case: RSCase | None = None
    collision_epsilon: float = 1e-8

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"particle count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        is_rs = fam in (Family.RS, Family.RS_PERTURBED)
        if is_rs:
            if self.rs_case is None:
                raise ValueError(f"{fam.value} requires rs_case")
            object.__setattr__(self, "rs_case", RSCase(self.rs_case))
        elif self.rs_case is not None:
            raise ValueError(f"rs_case is not a parameter of {fam.value}")
        required = _required_params(fam, self.rs_case)
        allowed = set(required)
        if is_rs and self.rs_case is RSCase.V:
            allowed.add("mu")
        for name in _OPTIONAL:
            val = getattr(self, name)
            if name in required and val is None:
                raise ValueError(f"{fam.value} requires parameter {name!r}")
            if name not in allowed and val is not None:
                raise ValueError(f"parameter {name!r} is not used by {fam.value}")
            if val is not None and name != "Omega":
                object.__setattr__(self, name, complex(val))
        if fam is Family.RS_PERTURBED:
            om = float(self.Omega)
            if not om > 0:
                raise ValueError("Omega must be > 0 for RS_PERTURBED")
            object.__setattr__(self, "Omega", om)
        if is_rs and self.rs_case is RSCase.V:
            if self.a == 0 or self.r == 0:
                raise ValueError("case v needs non-zero a and r")
            target = 1j / self.r
            if self.mu is None:
                object.__setattr__(self, "mu", cmath.asinh(target) / self.a)
            elif abs(cmath.sinh(self.a * self.mu) - target) >= 1e-12:
                raise ValueError("mu inconsistent with sinh(a mu) = i/r")
        if not self.collision_epsilon > 0:
            raise ValueError("collision_epsilon must be positive")

    # -- derived quantities -------------------------------------------------

    @property
    def is_rs(self) -> bool:
        return self.family in (Family.RS, Family.RS_PERTURBED)

    @property
    def has_lax(self) -> bool:
        return not (self.is_rs and self.rs_case in (RSCase.I, RSCase.II))

    def rs_lax_params(self):
        """``(a_eff, c)`` with ``c = coth(a_eff mu)`` for the RS Lax data."""
        if not self.is_rs:
            raise UnsupportedFamilyError(f"{self.family.value} is not an RS family")
        if self.rs_case is RSCase.V:
            am = self.a * self.mu
            return self.a, cmath.cosh(am) / cmath.sinh(am)
        if self.rs_case is RSCase.III:
            return self.a, 1.0 + 0j
        if self.rs_case is RSCase.IV:
            return self.a / 2, 0j
        raise UnsupportedFamilyError(
            f"rational RS case {self.rs_case.value} has no Lax matrix")

    @property
    def x_scale(self):
        """``s`` in ``X = diag(exp(2 s z))``; ``None`` when ``X = diag(z)``."""
        if self.family in (Family.CM_RATIONAL, Family.CM_HARMONIC):
            return None
        if self.family is Family.CS:
            return 1.0
        return self.rs_lax_params()[0]

    def kernel_args(self):
        """Positional arguments for the backend ``accelerations`` kernel."""
        fam = self.family
        if fam is Family.CM_RATIONAL:
            code = kernels._kernels_py.CM_RATIONAL
        elif fam is Family.CM_HARMONIC:
            code = kernels._kernels_py.CM_HARMONIC
        elif fam is Family.CS:
            code = kernels._kernels_py.CS
        else:
            code = kernels._kernels_py.RS
        case = _CASE_CODE[self.rs_case] if self.is_rs else 0
        zero = 0j
        params = np.array([
            self.g if self.g is not None else zero,
            self.lam if self.lam is not None else zero,
            self.a if self.a is not None else zero,
            self.r if self.r is not None else zero,
            complex(self.Omega) if self.Omega is not None else zero,
        ], dtype=np.complex128)
        return code, case, params, float(self.collision_epsilon)

    def to_dict(self):
        out = {"family": self.family.value, "n": self.n}
        for name in ("g", "lam", "a", "r", "mu", "Omega"):
            val = getattr(self, name)
            if val is not None:
                out["lambda" if name == "lam" else name] = val
        if self.rs_case is not None:
            out["rs_case"] = self.rs_case.value
        out["collision_epsilon"] = self.collision_epsilon
        return out


def _frozen(a):
    arr = np.array(a, dtype=np.complex128).ravel()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PhaseState:
    """Positions ``z`` and velocities/momenta ``v`` at time ``t``."""

    t: float
    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        z = _frozen(self.z)
        v = _frozen(self.v)
        if z.shape != v.shape:
            raise ValueError("z and v must have the same length")
        if z.size < 1:
            raise ValueError("need at least one particle")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(v))):
            raise ValueError("phase state has non-finite entries")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.z.size

    def min_separation(self):
        return min_separation(self.z)

    def check_separation(self, eps: float = 1e-8):
        dmin, i, j = min_separation(self.z)
        if dmin <= eps:
            raise CollisionError(i, j, dmin, self.t)


@dataclass(frozen=True)
class LaxData:
    L: np.ndarray
    M: np.ndarray
    X: np.ndarray
    Z: np.ndarray | None = field(default=None)
    W: np.ndarray | None = field(default=None)
    P: np.ndarray | None = field(default=None)


def _check_state(spec: SystemSpec, s: PhaseState):
    if s.n != spec.n:
        raise ValueError(f"state has {s.n} particles, spec expects {spec.n}")
    s.check_separation(spec.collision_epsilon)


def interaction_f(rs_case, z, spec: SystemSpec | None = None) -> complex:
    """The RS pair interaction ``f(z)`` of the selected case."""
    case = RSCase(rs_case)
    a = spec.a if spec is not None and spec.a is not None else 0j
    r = spec.r if spec is not None and spec.r is not None else 0j
    if case in (RSCase.III, RSCase.IV, RSCase.V) and (spec is None or spec.a is None):
        raise ValueError(f"case {case.value} needs the scale a")
    if case in (RSCase.II, RSCase.V) and (spec is None or spec.r is None):
        raise ValueError(f"case {case.value} needs r")
    out = pair_f(_CASE_CODE[case], np.array([complex(z)]), a, r)
    return complex(out[0])


def eom_rhs(spec: SystemSpec, s: PhaseState, backend=None):
    """``(dz, dv)`` for the first-order form of the equations of motion."""
    _check_state(spec, s)
    code, case, params, eps = spec.kernel_args()
    kern = kernels.get_backend(backend)
    try:
        dv = kern.accelerations(code, case, s.z, s.v, params, eps)
    except CollisionError as exc:
        exc.t = s.t
        raise
    return np.array(s.v, dtype=np.complex128), np.asarray(dv, dtype=np.complex128)


def _offdiag(n):
    return ~np.eye(n, dtype=bool)


def _guard(den, what):
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError(f"{what} too close to a pole")


def _rs_pieces(spec, z, v):
    a, c = spec.rs_lax_params()
    n = z.size
    off = _offdiag(n)
    dz = np.where(off, z[:, None] - z[None, :], 1.0)
    ep = np.exp(a * dz)
    em = np.exp(-a * dz)
    ch = 0.5 * (ep + em)
    sh = 0.5 * (ep - em)
    # cosh + c sinh in exponential form: no cancellation when c ~ 1
    den = 0.5 * ((1.0 + c) * ep + (1.0 - c) * em)
    _guard(np.where(off, den, 1.0), "alpha(z)")
    alpha = np.where(off, 1.0 / den, 0.0)
    sq = np.sqrt(v)
    return a, c, off, dz, ch, sh, den, alpha, sq


def build_lax(spec: SystemSpec, s: PhaseState) -> LaxData:
    """All Lax-type matrices of ``spec`` at the phase point ``s``."""
    if not spec.has_lax:
        raise UnsupportedFamilyError(
            f"RS case {spec.rs_case.value} has no Lax matrix")
    _check_state(spec, s)
    n = spec.n
    z, v = s.z, s.v
    fam = spec.family
    off = _offdiag(n)
    dz = np.where(off, z[:, None] - z[None, :], 1.0)
    if fam in (Family.CM_RATIONAL, Family.CM_HARMONIC, Family.CS):
        g = spec.g
        if fam is Family.CS:
            sh = np.sinh(dz)
            _guard(np.where(off, sh, 1.0), "1/sinh")
            inv = np.where(off, 1.0 / sh, 0.0)
            cosh_over = np.where(off, np.cosh(dz), 0.0)
            Moff = -1j * g * cosh_over * inv * inv
            X = np.diag(np.exp(2.0 * z))
        else:
            inv = np.where(off, 1.0 / dz, 0.0)
            Moff = -1j * g * inv * inv
            X = np.diag(z.astype(np.complex128))
        L = np.diag(v) + 1j * g * inv
        M = Moff + np.diag(1j * g * np.sum(inv * inv, axis=1))
        if fam is Family.CM_HARMONIC:
            lam = spec.lam
            Z = L + 1j * lam * X
            W = L - 1j * lam * X
            return LaxData(L=L, M=M, X=X, Z=Z, W=W, P=Z @ W)
        return LaxData(L=L, M=M, X=X)

    a, c, off, dz, ch, sh, den, alpha, sq = _rs_pieces(spec, z, v)
    _guard(np.where(off, sh, 1.0), "coth(a z)")
    coth = np.where(off, ch / np.where(off, sh, 1.0), 0.0)
    root = np.outer(sq, sq)
    L = np.diag(v) + root * alpha
    beta = -a * c * alpha * alpha.T
    gamma = -a * coth * alpha
    M = np.diag(beta @ v) + root * gamma
    X = np.diag(np.exp(2.0 * a * z))
    return LaxData(L=L, M=M, X=X)


def lax_derivatives(spec: SystemSpec, s: PhaseState, backend=None):
    """Time derivatives ``(Ldot, Xdot)`` by the chain rule along ``eom_rhs``."""
    if not spec.has_lax:
        raise UnsupportedFamilyError(
            f"RS case {spec.rs_case.value} has no Lax matrix")
    dz_dt, acc = eom_rhs(spec, s, backend)
    n = spec.n
    z, v = s.z, s.v
    fam = spec.family
    off = _offdiag(n)
    dv = np.where(off, v[:, None] - v[None, :], 0.0)
    dz = np.where(off, z[:, None] - z[None, :], 1.0)
    if fam in (Family.CM_RATIONAL, Family.CM_HARMONIC):
        Ldot = np.diag(acc) - 1j * spec.g * dv / dz ** 2 * off
        Xdot = np.diag(v.astype(np.complex128))
        return Ldot, Xdot
    if fam is Family.CS:
        sh = np.sinh(dz)
        Ldot = np.diag(acc) - 1j * spec.g * np.cosh(dz) * dv / sh ** 2 * off
        Xdot = np.diag(2.0 * v * np.exp(2.0 * z))
        return Ldot, Xdot
    a, c, off, dz, ch, sh, den, alpha, sq = _rs_pieces(spec, z, v)
    if np.any(np.abs(sq) < POLE_TOL):
        raise PoleError("Lax derivative needs non-zero velocities")
    dsq = acc / (2.0 * sq)
    droot = np.outer(dsq, sq) + np.outer(sq, dsq)
    dden = 0.5 * ((1.0 + c) * np.exp(a * dz) - (1.0 - c) * np.exp(-a * dz))
    dalpha = np.where(off, -a * dden * alpha * alpha, 0.0)
    root = np.outer(sq, sq)
    Ldot = np.diag(acc) + droot * alpha + root * dalpha * dv
    Xdot = np.diag(2.0 * a * v * np.exp(2.0 * a * z))
    return Ldot, Xdot


def lax_residuals(spec: SystemSpec, s: PhaseState, backend=None):
    """Max-norm residuals of the L and X evolution laws at ``s``.

    ``L``: ``Ldot - [L, M] - extra`` with extra ``-lam**2 X`` (CM_HARMONIC)
    or ``i Omega L`` (RS_PERTURBED).  ``X``: ``Xdot - [X, M] - c [X, L]_+ - d L``
    with ``(c, d) = (0, 1)`` for CM, ``(1, 0)`` for CS, ``(a, 0)`` for RS.

    The ``X`` residual is divided by ``max(1, |X|)``: for CS/RS ``X`` holds
    ``exp(2 a z)`` and its rounding error grows with the positions.
    """
    lax = build_lax(spec, s)
    Ldot, Xdot = lax_derivatives(spec, s, backend)
    L, M, X = lax.L, lax.M, lax.X
    extra = 0.0
    if spec.family is Family.CM_HARMONIC:
        extra = -(spec.lam ** 2) * X
    elif spec.family is Family.RS_PERTURBED:
        extra = 1j * spec.Omega * L
    res_L = Ldot - commutator(L, M) - extra
    if spec.family in (Family.CM_RATIONAL, Family.CM_HARMONIC):
        res_X = Xdot - commutator(X, M) - L
    else:
        res_X = Xdot - commutator(X, M) - spec.x_scale * anticommutator(X, L)
    return max_norm(res_L), max_norm(res_X) / max(1.0, max_norm(X))


def hamiltonian(spec: SystemSpec, s: PhaseState) -> complex:
    """Energy for CM/CS; for the RS families ``F_1 = tr(L) = sum zd_j``."""
    _check_state(spec, s)
    z, v = s.z, s.v
    if spec.is_rs:
        return complex(np.sum(v))
    iu = np.triu_indices(spec.n, 1)
    d = (z[:, None] - z[None, :])[iu]
    kinetic = 0.5 * np.sum(v * v)
    if spec.family is Family.CS:
        pot = spec.g ** 2 * np.sum(1.0 / np.sinh(d) ** 2)
    else:
        pot = spec.g ** 2 * np.sum(1.0 / d ** 2)
    if spec.family is Family.CM_HARMONIC:
        pot = pot + 0.5 * spec.lam ** 2 * np.sum(z * z)
    return complex(kinetic + pot)
