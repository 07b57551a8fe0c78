import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from laxlab import kernels
from laxlab.errors import CollisionError, PoleError, UnsupportedFamilyError
from laxlab.integrate import IntegratorOptions, integrate
from laxlab.presets import PRESETS
from laxlab.systems import (Family, PhaseState, RSCase, SystemSpec, build_lax, eom_rhs,
                            hamiltonian, interaction_f, lax_residuals)

LAX_PRESETS = [(name, n) for name in PRESETS for n in (2, 3, 4)
               if not (name in ("cmh", "rsp") and n == 4)]


# -- SystemSpec -------------------------------------------------------------

def test_spec_derives_mu():
    spec = SystemSpec("RS", 2, a=0.7, r=1.3, rs_case="v")
    assert abs(cmath.sinh(spec.a * spec.mu) - 1j / spec.r) < 1e-12


def test_spec_rejects_inconsistent_mu():
    with pytest.raises(ValueError):
        SystemSpec("RS", 2, a=1.0, r=0.8, mu=0.1, rs_case="v")


def test_spec_accepts_consistent_mu():
    mu = cmath.asinh(1j / 0.8)
    assert SystemSpec("RS", 2, a=1.0, r=0.8, mu=mu, rs_case="v").mu == mu


@pytest.mark.parametrize("kwargs", [
    dict(family="CM_RATIONAL", n=2),                          # missing g
    dict(family="CM_RATIONAL", n=2, g=1.0, lam=1.0),          # unused lam
    dict(family="CS", n=2, g=1.0, a=1.0),                     # CS has a = 1 implicitly
    dict(family="RS", n=2, a=1.0, r=1.0),                     # no rs_case
    dict(family="RS", n=2, a=1.0, rs_case="i"),               # case i takes no a
    dict(family="RS_PERTURBED", n=2, rs_case="i"),            # missing Omega
    dict(family="RS_PERTURBED", n=2, rs_case="i", Omega=-1.0),
    dict(family="CM_RATIONAL", n=0, g=1.0),
    dict(family="NOPE", n=2),
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SystemSpec(**kwargs)


def test_phase_state_is_immutable():
    s = PhaseState(0.0, [1.0, 2.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        s.z[0] = 5.0


def test_phase_state_rejects_nan():
    with pytest.raises(ValueError):
        PhaseState(0.0, [np.nan], [0.0])


# -- equations of motion ----------------------------------------------------

def test_eom_free_particle():
    spec = SystemSpec("CM_RATIONAL", 1, g=3.0)
    dz, dv = eom_rhs(spec, PhaseState(0.0, [5.0], [2.0]))
    assert dz.tolist() == [2.0] and dv.tolist() == [0.0]


def test_eom_rs_case_i_example():
    spec = SystemSpec("RS", 2, rs_case="i")
    _, dv = eom_rhs(spec, PhaseState(0.0, [1.0, 0.0], [1.0, -1.0]))
    np.testing.assert_allclose(dv, [-2.0, 2.0], atol=1e-15)


@pytest.mark.parametrize("case, params", [("i", {}), ("ii", {"r": 0.5}), ("iii", {"a": 1.0}),
                                          ("iv", {"a": 1.0}), ("v", {"a": 1.0, "r": 0.8})])
def test_eom_perturbed_zero_velocity(case, params):
    spec = SystemSpec("RS_PERTURBED", 3, rs_case=case, Omega=1.3, **params)
    _, dv = eom_rhs(spec, PhaseState(0.0, [-1.0, 0.1, 0.9], [0.0, 0.0, 0.0]))
    assert np.all(dv == 0)


def test_eom_cm_two_body_force():
    # repulsive 2 g^2 / d^3
    spec = SystemSpec("CM_RATIONAL", 2, g=1.5)
    _, dv = eom_rhs(spec, PhaseState(0.0, [0.0, 2.0], [0.0, 0.0]))
    np.testing.assert_allclose(dv, [-2 * 2.25 / 8, 2 * 2.25 / 8])


def test_eom_harmonic_single_particle():
    spec = SystemSpec("CM_HARMONIC", 1, g=1.0, lam=2.0)
    _, dv = eom_rhs(spec, PhaseState(0.0, [0.5], [0.0]))
    np.testing.assert_allclose(dv, [-4.0 * 0.5])


def test_eom_cs_matches_hamiltonian_gradient():
    # force = -dH/dx by finite differences of the energy
    spec = SystemSpec("CS", 3, g=0.7)
    z = np.array([-1.1, 0.2, 1.4])
    _, dv = eom_rhs(spec, PhaseState(0.0, z, [0.0, 0.0, 0.0]))
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        Hp = hamiltonian(spec, PhaseState(0.0, z + e, [0, 0, 0]))
        Hm = hamiltonian(spec, PhaseState(0.0, z - e, [0, 0, 0]))
        assert abs(dv[i] + (Hp - Hm) / (2 * h)) < 1e-8


def test_eom_collision():
    spec = SystemSpec("CM_RATIONAL", 2, g=1.0)
    with pytest.raises(CollisionError) as info:
        eom_rhs(spec, PhaseState(0.5, [1.0, 1.0 + 1e-10], [0.0, 0.0]))
    assert info.value.pair == (0, 1)
    assert info.value.t == 0.5


@pytest.mark.parametrize("name, n", LAX_PRESETS)
def test_backends_agree(name, n):
    if "cython" not in kernels.BACKENDS:
        pytest.skip("compiled kernel not built")
    spec, s = PRESETS[name](n)
    _, a = eom_rhs(spec, s, backend="python")
    _, b = eom_rhs(spec, s, backend="cython")
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("case, params", [("i", {}), ("ii", {"r": 0.5}), ("iv", {"a": 0.6})])
def test_backends_agree_rs_cases(case, params):
    if "cython" not in kernels.BACKENDS:
        pytest.skip("compiled kernel not built")
    spec = SystemSpec("RS_PERTURBED", 3, rs_case=case, Omega=0.9, **params)
    s = PhaseState(0.0, [-1.0, 0.1 + 0.2j, 0.9], [0.3, -0.2j, 0.5])
    _, a = eom_rhs(spec, s, backend="python")
    _, b = eom_rhs(spec, s, backend="cython")
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-15)


# -- interaction functions --------------------------------------------------

def test_interaction_case_i():
    assert interaction_f("i", 1.0) == 2.0


def test_interaction_case_iii_asymptote():
    spec = SystemSpec("RS", 2, a=1.0, rs_case="iii")
    assert abs(interaction_f("iii", 30.0, spec) - 2.0) < 1e-12


def test_interaction_case_v_arbitrary_precision():
    spec = SystemSpec("RS", 2, a=1.0, r=1.0, rs_case="v")
    mpmath.mp.dps = 40
    z = mpmath.mpf("0.7")
    ref = 2 * mpmath.coth(z) / (1 + mpmath.sinh(z) ** 2)
    assert abs(interaction_f("v", 0.7, spec) - complex(ref)) < 1e-14


def test_interaction_case_v_to_iii():
    z = 0.7 + 0.1j
    iii = interaction_f("iii", z, SystemSpec("RS", 2, a=1.2, rs_case="iii"))
    v = interaction_f("v", z, SystemSpec("RS", 2, a=1.2, r=1e-4, rs_case="v"))
    assert abs(v - iii) < 1e-6


def test_interaction_case_iii_to_i():
    z = 0.7
    i = interaction_f("i", z)
    iii = interaction_f("iii", z, SystemSpec("RS", 2, a=1e-4, rs_case="iii"))
    assert abs(iii - i) < 1e-6


def test_interaction_case_ii_to_i():
    z = 0.7
    ii = interaction_f("ii", z, SystemSpec("RS", 2, r=1e-4, rs_case="ii"))
    assert abs(ii - interaction_f("i", z)) < 1e-6


def test_interaction_pole():
    with pytest.raises(PoleError):
        interaction_f("i", 0.0)
    spec = SystemSpec("RS", 2, a=1.0, r=1.0, rs_case="v")
    # 1 + sinh^2 = 0 at z = i pi / 2
    with pytest.raises(PoleError):
        interaction_f("v", 1j * np.pi / 2, spec)


# -- Lax data ---------------------------------------------------------------

def test_lax_cm_example():
    spec = SystemSpec("CM_RATIONAL", 2, g=1.0)
    lax = build_lax(spec, PhaseState(0.0, [0.0, 1.0], [2.0, 3.0]))
    np.testing.assert_allclose(lax.L, [[2, -1j], [1j, 3]])
    np.testing.assert_allclose(lax.X, np.diag([0, 1]))


def test_lax_cs_single_particle():
    spec = SystemSpec("CS", 1, g=0.4)
    lax = build_lax(spec, PhaseState(0.0, [0.5], [1.7]))
    np.testing.assert_allclose(lax.L, [[1.7]])
    np.testing.assert_allclose(lax.X, [[np.e]])


def test_lax_harmonic_identities():
    spec = SystemSpec("CM_HARMONIC", 2, g=1.0, lam=2.0)
    lax = build_lax(spec, PhaseState(0.0, [0.0, 1.0], [2.0, 3.0]))
    np.testing.assert_array_equal(lax.Z - lax.W, 2j * 2.0 * lax.X)
    assert np.max(np.abs(lax.P - lax.Z @ lax.W)) <= 1e-15


@pytest.mark.parametrize("name, n", LAX_PRESETS)
def test_x_is_diagonal(name, n):
    spec, s = PRESETS[name](n)
    X = build_lax(spec, s).X
    assert np.all(X[~np.eye(n, dtype=bool)] == 0)


@pytest.mark.parametrize("family", ["CM_RATIONAL", "CS"])
def test_offdiagonal_antisymmetry(family):
    spec = SystemSpec(family, 4, g=0.9)
    L = build_lax(spec, PhaseState(0.0, [-1.5, -0.4, 0.6, 1.8], [0.1, 0.2, 0.3, 0.4])).L
    off = ~np.eye(4, dtype=bool)
    np.testing.assert_allclose(L[off], -L.T[off], atol=1e-15)


def test_rational_rs_has_no_lax():
    spec = SystemSpec("RS", 2, rs_case="i")
    with pytest.raises(UnsupportedFamilyError):
        build_lax(spec, PhaseState(0.0, [0.0, 1.0], [1.0, 1.0]))


@pytest.mark.parametrize("case, params", [("iii", {"a": 0.8}), ("iv", {"a": 0.8}),
                                          ("v", {"a": 0.8, "r": 1.3})])
def test_rs_cases_lax_residual(case, params):
    spec = SystemSpec("RS", 3, rs_case=case, **params)
    s = PhaseState(0.0, [-1.1, 0.2, 1.4], [0.5, 0.8 + 0.1j, 0.6])
    rL, rX = lax_residuals(spec, s)
    assert rL < 1e-12 and rX < 1e-12


def test_rs_branch_gauge_invariance():
    # -0.3 + 0j and -0.3 - 0j select opposite principal square roots
    spec = SystemSpec("RS", 3, a=1.0, r=0.8, rs_case="v")
    z = [-1.1, 0.2, 1.4]
    up = build_lax(spec, PhaseState(0.0, z, [0.5, complex(-0.3, 0.0), 0.6]))
    dn = build_lax(spec, PhaseState(0.0, z, [0.5, complex(-0.3, -0.0), 0.6]))
    assert np.max(np.abs(up.L - dn.L)) > 0.1
    D = np.diag([1.0, -1.0, 1.0])
    np.testing.assert_allclose(dn.L, D @ up.L @ D, atol=1e-15)
    for k in range(1, 5):
        Lu, Ld = np.linalg.matrix_power(up.L, k), np.linalg.matrix_power(dn.L, k)
        assert abs(np.trace(Lu) - np.trace(Ld)) < 1e-12
        assert abs(np.trace(up.X @ Lu) - np.trace(dn.X @ Ld)) < 1e-12


@pytest.mark.parametrize("name, n", LAX_PRESETS)
def test_lax_residual_along_trajectory(name, n):
    spec, s = PRESETS[name](n)
    traj = integrate(spec, s, IntegratorOptions(t_end=2.0, sample_every=0.5))
    assert traj.error is None
    for smp in traj.samples:
        rL, rX = lax_residuals(spec, smp.state)
        assert rL < 1e-7 and rX < 1e-7


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3, unique=True),
       st.lists(st.floats(0.1, 1.5), min_size=3, max_size=3),
       st.sampled_from(["CM_RATIONAL", "CM_HARMONIC", "CS", "RS", "RS_PERTURBED"]))
def test_lax_residual_property(xs, vs, family):
    xs = sorted(xs)
    if min(np.diff(xs)) < 0.05:
        return
    kw = {"CM_RATIONAL": dict(g=0.8), "CM_HARMONIC": dict(g=0.8, lam=1.1), "CS": dict(g=0.8),
          "RS": dict(a=0.9, r=1.2, rs_case="v"),
          "RS_PERTURBED": dict(a=0.9, r=1.2, rs_case="v", Omega=0.7)}[family]
    spec = SystemSpec(family, 3, **kw)
    rL, rX = lax_residuals(spec, PhaseState(0.0, xs, vs))
    scale = max(1.0, 1.0 / min(np.diff(xs)) ** 3)
    assert rL < 1e-11 * scale and rX < 1e-11 * scale


# -- Hamiltonian ------------------------------------------------------------

def test_hamiltonian_free():
    spec = SystemSpec("CM_RATIONAL", 1, g=1.0)
    assert hamiltonian(spec, PhaseState(0.0, [0.0], [3.0])) == 4.5


def test_hamiltonian_pair_counted_once():
    spec = SystemSpec("CM_RATIONAL", 2, g=1.0)
    assert hamiltonian(spec, PhaseState(0.0, [0.0, 1.0], [0.0, 0.0])) == pytest.approx(1.0)


def test_hamiltonian_cs_single():
    spec = SystemSpec("CS", 1, g=2.0)
    assert hamiltonian(spec, PhaseState(0.0, [0.3], [1.2])) == pytest.approx(0.72)


def test_hamiltonian_rs_is_trace():
    spec, s = PRESETS["rs"](3)
    assert hamiltonian(spec, s) == pytest.approx(np.trace(build_lax(spec, s).L))


def test_hamiltonian_equals_half_trace_l_squared():
    spec, s = PRESETS["cm"](4)
    L = build_lax(spec, s).L
    assert hamiltonian(spec, s) == pytest.approx(0.5 * np.trace(L @ L))


@pytest.mark.parametrize("name", ["cm", "cmh", "cs"])
def test_energy_conserved(name):
    spec, s = PRESETS[name](3)
    traj = integrate(spec, s, IntegratorOptions(t_end=5.0, sample_every=0.5))
    assert traj.energy_drift_max < 1e-8
