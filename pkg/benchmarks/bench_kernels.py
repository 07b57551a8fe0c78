"""Compare the compiled and pure-Python equation-of-motion kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Two measurements per family: a single right-hand-side evaluation (median
over many calls) and a full adaptive integration over ``[0, 5]``.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from laxlab import kernels
from laxlab.integrate import IntegratorOptions, integrate
from laxlab.systems import PhaseState, SystemSpec

CASES = {
    "CM_RATIONAL": lambda n: SystemSpec("CM_RATIONAL", n, g=1.0),
    "CS": lambda n: SystemSpec("CS", n, g=0.7),
    "RS(v)": lambda n: SystemSpec("RS", n, a=1.0, r=0.8, rs_case="v"),
}


def state(n):
    z = np.linspace(-0.6 * n, 0.6 * n, n) + 0.05 * np.sin(np.arange(n))
    v = 0.4 + 0.1 * np.cos(np.arange(n))
    return PhaseState(0.0, z, v)


def time_rhs(spec, s, backend, calls=2000):
    kern = kernels.get_backend(backend)
    code, case, params, eps = spec.kernel_args()
    z, v = np.array(s.z), np.array(s.v)
    samples = []
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(calls):
            kern.accelerations(code, case, z, v, params, eps)
        samples.append((time.perf_counter() - t0) / calls)
    return statistics.median(samples)


def time_integrate(spec, s, backend, repeat):
    opts = IntegratorOptions(t_end=5.0, sample_every=1.0)
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        integrate(spec, s, opts, backend=backend, with_frames=False)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="3,6,12")
    ap.add_argument("--json", default=None, help="also write results here")
    args = ap.parse_args(argv)
    if "cython" not in kernels.BACKENDS:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
        return 1
    sizes = [int(x) for x in args.sizes.split(",")]
    rows = []
    print(f"{'family':<12} {'n':>3} {'rhs py [us]':>12} {'rhs cy [us]':>12} {'x':>6} "
          f"{'int py [s]':>11} {'int cy [s]':>11} {'x':>6}")
    for name, make in CASES.items():
        for n in sizes:
            spec, s = make(n), state(n)
            rp, rc = time_rhs(spec, s, "python"), time_rhs(spec, s, "cython")
            ip = time_integrate(spec, s, "python", args.repeat)
            ic = time_integrate(spec, s, "cython", args.repeat)
            rows.append({"family": name, "n": n, "rhs_python_s": rp, "rhs_cython_s": rc,
                         "integrate_python_s": ip, "integrate_cython_s": ic})
            print(f"{name:<12} {n:>3} {rp * 1e6:>12.2f} {rc * 1e6:>12.2f} {rp / rc:>6.1f} "
                  f"{ip:>11.3f} {ic:>11.3f} {ip / ic:>6.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
