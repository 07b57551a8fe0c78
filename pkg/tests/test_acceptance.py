"""Acceptance criteria AC-1 .. AC-10.

Each test records a one-line PASS/FAIL verdict with the measured value and
its tolerance; the lines are printed at the end of the pytest run and by
``python tests/test_acceptance.py``.
"""
import math

import numpy as np
import pytest

from laxlab.checks import (check_companion_closure, check_conservation,
                           check_derivative_law, check_factor_adjudication,
                           check_linalg_kernel, check_periodicity, check_rotation_law,
                           check_solver_agreement, check_superintegrals)
from laxlab.integrate import IntegratorOptions
from laxlab.presets import PRESETS
from laxlab.systems import PhaseState, SystemSpec

pytestmark = pytest.mark.acceptance

RESULTS = {}
OPTS = IntegratorOptions(t_end=5.0, sample_every=0.1, atol=1e-10, rtol=1e-10)


def record(ac, passed, text):
    line = f"{ac} {'PASS' if passed else 'FAIL'}: {text}"
    RESULTS[ac] = line
    print(line)
    return passed


def test_ac1_conservation():
    parts, ok = [], True
    for name in ("cm", "cs", "rs"):
        spec, s = PRESETS[name](4)
        r = check_conservation(spec, s, OPTS)
        ok &= r.passed
        parts.append(f"{spec.family.value}={r.measured:.2e}")
    assert record("AC-1", ok, "max relative F_k drift over [0,5], n=4: "
                  + ", ".join(parts) + " (tol 1e-6)")


def test_ac2_linear_law():
    parts, ok = [], True
    for name, n in (("cm", 3), ("rs", 4), ("cs", 4)):
        spec, s = PRESETS[name](n)
        r = check_derivative_law(spec, s, OPTS)
        ok &= r.passed
        d = r.details
        ratio = ("FD exact, ratio n/a" if d["fd_exact_at_noise_floor"]
                 else f"ratio {d['convergence_ratio']:.3f}")
        parts.append(f"{spec.family.value} residual {r.measured:.2e} ({ratio})")
    assert record("AC-2", ok, "; ".join(parts) + " (ratio in [3.5,4.5], residual < 1e-5)")


def test_ac3_factor_two():
    parts, ok = [], True
    for n in (2, 3):
        spec, s = PRESETS["cs"](n)
        r = check_factor_adjudication(spec, s, OPTS)
        ok &= r.passed
        ratios = [complex(*m["ratio"]).real for m in r.details["measured"]]
        parts.append(f"n={n} ratios {', '.join(f'{x:.6f}' for x in ratios)}")
    assert record("AC-3", ok, "CS dG_k/dt / G_{k+1}: " + "; ".join(parts)
                  + " (expect 2 within 1e-4)")


def test_ac4_harmonic_sign():
    parts, ok = [], True
    for n in (2, 3):
        spec, s = PRESETS["cmh"](n)
        r = check_factor_adjudication(spec, s, OPTS)
        ok &= r.passed
        parts.append(f"n={n} worst deviation {r.measured:.2e}")
    assert record("AC-4", ok, "CM_HARMONIC dG/G = -i lam, dF/F = +i lam: " + "; ".join(parts)
                  + " (tol 1e-6)")


def test_ac5_rotation_law():
    parts, ok = [], True
    for n in (2, 3):
        spec, s = PRESETS["rsp"](n)
        r = check_rotation_law(spec, s, OPTS)
        ok &= r.passed and r.details["samples"] >= 20
        parts.append(f"n={n} {r.measured:.2e} over {r.details['samples']} samples")
    assert record("AC-5", ok, "|F_k(t) - e^{i Omega k t} F_k(0)|: " + "; ".join(parts)
                  + " (tol 1e-6)")


def test_ac6_periodicity():
    spec, s = PRESETS["rsp"](2)
    r = check_periodicity(spec, s, OPTS)
    alt = r.details["alternative"]
    assert record("AC-6", r.passed,
                  f"return error at T=2pi/Omega {r.measured:.2e} (tol 1e-5); "
                  f"at T=Omega {alt['return_error']:.2e}")
    assert alt["return_error"] > 1e-3


def _ac7_cases():
    z = (-1.1, 0.2, 1.4)
    yield PRESETS["cm"](3)
    yield PRESETS["cmh"](3)
    yield PRESETS["cs"](3)
    yield PRESETS["rs"](3)
    yield SystemSpec("RS", 3, a=1.0, rs_case="iii"), PhaseState(0.0, z, (0.5, 0.8, 0.6))
    yield SystemSpec("RS", 3, a=1.0, rs_case="iv"), PhaseState(0.0, z, (0.5, 0.8, 0.6))
    yield PRESETS["rsp"](3)


def test_ac7_solver_agreement():
    worst, closed, ok, names = 0.0, 0.0, True, []
    for spec, s in _ac7_cases():
        r = check_solver_agreement(spec, s, OPTS)
        ok &= r.passed
        worst = max(worst, r.measured)
        closed = max(closed, r.details.get("closed_form_return_error", 0.0))
        label = spec.family.value + (f"({spec.rs_case.value})" if spec.is_rs else "")
        names.append(label)
    assert record("AC-7", ok, f"spectral vs oracle positions at t=0.5,1,2, n=3, "
                  f"{len(names)} families: max {worst:.2e} (tol 1e-6); perturbed closed form "
                  f"at T: {closed:.2e} (tol 1e-12)")


def test_ac8_companion_closure():
    ch, gn, ok = 0.0, 0.0, True
    for name in PRESETS:
        for n in (2, 3):
            spec, s = PRESETS[name](n)
            r = check_companion_closure(spec, s, OPTS)
            ok &= r.passed
            ch = max(ch, r.details["cayley_hamilton_residual_over_bound"])
            gn = max(gn, r.details["G_n_closure_rel_error"])
    assert record("AC-8", ok, f"Cayley-Hamilton residual / bound max {ch:.2e} (< 1); "
                  f"G_n closure {gn:.2e} (tol 1e-9)")


def test_ac9_superintegrals():
    parts, ok = [], True
    for n in (2, 3, 4):
        spec, s = PRESETS["cm"](n)
        r = check_superintegrals(spec, s, OPTS)
        ok &= r.passed
        sv = r.details["jacobian_singular_values"]
        kept = sv[r.details["jacobian_rank"] - 1] / sv[0]
        parts.append(f"n={n} drift {r.measured:.2e} rank {r.details['jacobian_rank']}/"
                     f"{r.details['expected_rank']} (sigma_min/sigma_max {kept:.1e})")
    assert record("AC-9", ok, "; ".join(parts) + " (drift tol 1e-6)")


def test_ac10_linalg_kernel():
    r = check_linalg_kernel(None, None, None, seed=0, cases=200)
    d = r.details
    assert record("AC-10", r.passed,
                  f"200 cases: char_poly vs cofactor {d['char_poly_vs_cofactor']:.1e} (1e-12), "
                  f"Newton round trip {d['newton_round_trip']:.1e} (1e-12), "
                  f"eig trace/det {d['eigen_trace_det']:.1e} (1e-9), "
                  f"exp inverse {d['exp_inverse_identity']:.1e} (1e-10)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
