"""ODE oracle: explicit Runge-Kutta integration of the equations of motion.

The complex first-order system ``y = (z, v)`` is stepped as one complex
vector; step-size control and error norms act on the real and imaginary
parts separately, i.e. on the equivalent real system of dimension ``4n``.
Steps are shortened so that every sample time on the ``sample_every`` grid
is hit exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .errors import CollisionError, IntegrationError
from .systems import PhaseState, SystemSpec, hamiltonian

__all__ = [
    "Method",
    "IntegratorOptions",
    "Sample",
    "Trajectory",
    "integrate",
    "solve_ode",
    "fd_derivative",
]


class Method(str, Enum):
    RK4_FIXED = "RK4_FIXED"
    RK45_ADAPTIVE = "RK45_ADAPTIVE"


@dataclass(frozen=True)
class IntegratorOptions:
    t_end: float
    sample_every: float
    method: Method = Method.RK45_ADAPTIVE
    h: float | None = None
    atol: float = 1e-10
    rtol: float = 1e-10
    max_steps: int = 2_000_000

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not self.sample_every > 0:
            raise ValueError("sample_every must be positive")
        if self.method is Method.RK4_FIXED:
            if self.h is None or not self.h > 0:
                raise ValueError("RK4_FIXED needs a positive step h")
        if not (self.atol > 0 and self.rtol > 0):
            raise ValueError("atol and rtol must be positive")

    def sample_times(self):
        k = int(math.floor(self.t_end / self.sample_every + 1e-9))
        ts = [i * self.sample_every for i in range(k + 1)]
        if self.t_end - ts[-1] > 1e-12 * max(1.0, self.t_end):
            ts.append(self.t_end)
        return ts


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _err_norm(err, y, y_new, atol, rtol):
    er = err.view(np.float64)
    sc = atol + rtol * np.maximum(np.abs(y.view(np.float64)),
                                  np.abs(y_new.view(np.float64)))
    return float(np.max(np.abs(er) / sc))


def _initial_step(fun, t0, y0, f0, atol, rtol, span):
    sc = atol + rtol * np.abs(y0.view(np.float64))
    d0 = float(np.max(np.abs(y0.view(np.float64)) / sc))
    d1 = float(np.max(np.abs(f0.view(np.float64)) / sc))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h0, span)


def solve_ode(fun, y0, times, *, method=Method.RK45_ADAPTIVE, h=None,
              atol=1e-10, rtol=1e-10, max_steps=2_000_000, stats=None):
    """Integrate ``y' = fun(t, y)`` and yield ``(t, y)`` at each of ``times``.

    ``times`` must start at the initial time and increase strictly.  ``stats``
    (a dict) receives ``accepted``, ``rejected`` and ``nfev`` counters.
    Exceptions raised by ``fun`` propagate; step-size underflow raises
    :class:`IntegrationError`.
    """
    method = Method(method)
    if stats is None:
        stats = {}
    stats.setdefault("accepted", 0)
    stats.setdefault("rejected", 0)
    stats.setdefault("nfev", 0)
    y = np.array(y0, dtype=np.complex128)
    t = float(times[0])
    yield t, y.copy()
    if len(times) == 1:
        return

    def f(tt, yy):
        stats["nfev"] += 1
        return fun(tt, yy)

    if method is Method.RK4_FIXED:
        for target in times[1:]:
            while t < target:
                step = h
                if t + step > target - 1e-12 * max(1.0, abs(target)):
                    step = target - t
                k1 = f(t, y)
                k2 = f(t + step / 2, y + step / 2 * k1)
                k3 = f(t + step / 2, y + step / 2 * k2)
                k4 = f(t + step, y + step * k3)
                y = y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                t = target if step == target - t else t + step
                stats["accepted"] += 1
            yield t, y.copy()
        return

    k1 = f(t, y)
    hnext = _initial_step(f, t, y, k1, atol, rtol, times[-1] - t)
    steps = 0
    for target in times[1:]:
        while t < target:
            steps += 1
            if steps > max_steps:
                raise IntegrationError(f"exceeded {max_steps} steps at t={t!r}")
            if hnext < 16 * np.finfo(float).eps * max(1.0, abs(t)):
                raise IntegrationError(f"step size underflow at t={t!r}")
            landing = t + hnext >= target - 1e-12 * max(1.0, abs(target))
            step = target - t if landing else hnext
            ks = [k1]
            for s in range(1, 7):
                acc = y.copy()
                for j, aij in enumerate(_A[s]):
                    if aij:
                        acc += step * aij * ks[j]
                if s == 6:
                    y_new = acc
                ks.append(f(t + _C[s] * step, acc))
            err = step * sum(e * k for e, k in zip(_E, ks) if e)
            norm = _err_norm(err, y, y_new, atol, rtol)
            if norm <= 1.0:
                t = target if landing else t + step
                y = y_new
                k1 = ks[6]
                stats["accepted"] += 1
                fac = 5.0 if norm == 0 else min(5.0, 0.9 * norm ** -0.2)
                proposal = step * max(0.2, fac)
                # a truncated landing step must not shrink the next proposal
                hnext = max(proposal, hnext) if landing else proposal
            else:
                stats["rejected"] += 1
                hnext = step * max(0.2, 0.9 * norm ** -0.2)
        yield t, y.copy()


@dataclass
class Sample:
    state: PhaseState
    frame: object | None
    F_drift: float
    energy_drift: float
    min_separation: float
    rejected: int


@dataclass
class Trajectory:
    """Samples of one integration run plus run-level diagnostics.

    ``error`` is ``None`` for a complete run, otherwise a dict with keys
    ``type`` (``"collision"``), ``t``, ``pair`` and ``message``; the samples
    then end at the last grid time reached before the failure.
    """

    spec: SystemSpec
    samples: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    error: dict | None = None

    @property
    def times(self):
        return np.array([s.state.t for s in self.samples])

    def positions(self):
        return np.array([s.state.z for s in self.samples])

    def velocities(self):
        return np.array([s.state.v for s in self.samples])

    def series(self, name, k):
        """Time series of ``F`` or ``G`` component ``k`` across samples."""
        return np.array([getattr(s.frame, name)[k] for s in self.samples])

    @property
    def F_drift_max(self):
        return max((s.F_drift for s in self.samples), default=0.0)

    @property
    def energy_drift_max(self):
        return max((s.energy_drift for s in self.samples), default=0.0)

    @property
    def min_separation(self):
        return min((s.min_separation for s in self.samples), default=math.inf)


def _energy_phase(spec, t):
    if spec.family.value == "RS_PERTURBED":
        return complex(np.exp(1j * spec.Omega * t))
    return 1.0


def integrate(spec: SystemSpec, s0: PhaseState, opts: IntegratorOptions,
              backend=None, with_frames=True) -> Trajectory:
    """Integrate from ``s0`` over ``[0, t_end]``, sampling every ``sample_every``.

    A collision is not raised: the partial trajectory is returned with
    ``error`` set.  Step-size underflow raises :class:`IntegrationError`.
    """
    from .observables import frame as make_frame, invariant_phase

    if s0.n != spec.n:
        raise ValueError(f"state has {s0.n} particles, spec expects {spec.n}")
    s0.check_separation(spec.collision_epsilon)
    kern = kernels.get_backend(backend)
    code, case, params, eps = spec.kernel_args()
    n = spec.n
    t0 = s0.t

    def rhs(t, y):
        z = y[:n]
        v = y[n:]
        try:
            acc = kern.accelerations(code, case, z, v, params, eps)
        except CollisionError as exc:
            exc.t = t
            raise
        return np.concatenate((v, acc))

    times = [t0 + t for t in opts.sample_times()]
    traj = Trajectory(spec=spec)
    y0 = np.concatenate((s0.z, s0.v))
    frames = with_frames and spec.has_lax
    F0 = None
    H0 = hamiltonian(spec, s0)
    gen = solve_ode(rhs, y0, times, method=opts.method, h=opts.h,
                    atol=opts.atol, rtol=opts.rtol, max_steps=opts.max_steps,
                    stats=traj.stats)
    try:
        for i, (t, y) in enumerate(gen):
            state = s0 if i == 0 else PhaseState(t, y[:n], y[n:])
            fr = make_frame(spec, state) if frames else None
            if fr is not None and F0 is None:
                F0 = np.array(fr.F)
            if fr is not None:
                ph = np.array([invariant_phase(spec, k, t - t0) for k in range(n)])
                F_drift = float(np.max(np.abs(np.array(fr.F) - ph * F0)
                                       / np.maximum(1.0, np.abs(F0))))
            else:
                F_drift = 0.0
            H = hamiltonian(spec, state)
            e_drift = abs(H - _energy_phase(spec, t - t0) * H0) / max(1.0, abs(H0))
            traj.samples.append(Sample(
                state=state, frame=fr, F_drift=F_drift, energy_drift=float(e_drift),
                min_separation=state.min_separation()[0],
                rejected=traj.stats.get("rejected", 0)))
    except CollisionError as exc:
        traj.error = {"type": "collision", "t": exc.t, "pair": list(exc.pair),
                      "message": str(exc)}
    return traj


def fd_derivative(series, index: int, h: float) -> complex:
    """Central difference ``(f[i+1] - f[i-1]) / (2h)`` on a uniform grid."""
    n = len(series)
    if index < 1 or index > n - 2:
        raise IndexError(f"central stencil unavailable at index {index} of {n}")
    if not h > 0:
        raise ValueError("h must be positive")
    return (series[index + 1] - series[index - 1]) / (2.0 * h)
