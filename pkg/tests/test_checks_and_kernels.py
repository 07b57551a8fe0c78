import json
import os
import subprocess
import sys

import numpy as np
import pytest

from laxlab import kernels
from laxlab.checks import CHECKS, cofactor_char_poly, run_check
from laxlab.cli import dumps
from laxlab.errors import ConfigError
from laxlab.integrate import IntegratorOptions
from laxlab.presets import PRESETS

OPTS = IntegratorOptions(2.0, 0.1)


def test_cofactor_oracle_small():
    # det(x I - diag(1, 2)) = x^2 - 3x + 2
    np.testing.assert_allclose(cofactor_char_poly(np.diag([1.0, 2.0])), [2, -3, 1])


def test_unknown_check():
    spec, s = PRESETS["cm"](2)
    with pytest.raises(ConfigError):
        run_check("nope", spec, s, OPTS)


@pytest.mark.parametrize("name, preset", [("periodicity", "cs"), ("rotation_law", "rs"),
                                          ("superintegrals", "rs"),
                                          ("factor_adjudication", "cm")])
def test_inapplicable_checks(name, preset):
    spec, s = PRESETS[preset](2)
    with pytest.raises(ConfigError):
        run_check(name, spec, s, OPTS)


def test_results_serialize():
    spec, s = PRESETS["rsp"](2)
    for name in ("lax_residual", "rotation_law", "periodicity"):
        r = run_check(name, spec, s, OPTS)
        json.loads(dumps(r.to_dict()))


def test_registry_complete():
    assert set(CHECKS) >= {"lax_residual", "conservation", "derivative_law",
                           "companion_closure", "superintegrals", "rotation_law",
                           "periodicity", "solver_agreement", "factor_adjudication"}


def test_get_backend_unknown():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_pure_python_env_forces_fallback():
    code = "from laxlab import kernels; print(kernels.DEFAULT_BACKEND)"
    env = dict(os.environ, LAXLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernel not built")
def test_compiled_kernel_rejects_bad_case():
    z = np.array([0.0, 1.0], dtype=np.complex128)
    params = np.zeros(5, dtype=np.complex128)
    with pytest.raises(ValueError):
        kernels.get_backend("cython").accelerations(3, 9, z, z, params, 1e-8)


@pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernel not built")
def test_compiled_kernel_single_particle():
    z = np.array([0.3 + 0.1j], dtype=np.complex128)
    params = np.array([1, 2, 0, 0, 0], dtype=np.complex128)
    acc = kernels.get_backend("cython").accelerations(1, 0, z, z, params, 1e-8)
    np.testing.assert_allclose(acc, -4 * z)


def test_benchmark_smoke(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    expected = 0 if "cython" in kernels.BACKENDS else 1
    assert mod.main(["--repeat", "1", "--sizes", "2"]) == expected
