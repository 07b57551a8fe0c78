"""Command-line front end: ``laxlab run|verify|solve CONFIG``.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 collision, 4 integrator failure, 5 unsupported family.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .checks import run_check
from .config import RunConfig, load_config
from .errors import (CollisionError, ConfigError, IntegrationError,
                     UnsupportedFamilyError)
from .integrate import IntegratorOptions, integrate
from .linalg import canonical_order
from .solver import evolve_G, evolve_G_perturbed, make_solution, spectral_positions
from .systems import Family

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_COLLISION = 3
EXIT_INTEGRATOR = 4
EXIT_UNSUPPORTED = 5

FLOAT_FMT = ".17g"


def _plain(obj):
    """Convert numpy scalars/arrays and complex values to JSON-ready types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent=2, _level=0) -> str:
    """JSON text with every float printed at 17 significant digits.

    Non-finite floats become ``null``.
    """
    obj = _plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, FLOAT_FMT)
    return json.dumps(obj)


def write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")


def trajectory_header(n, with_frames):
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"z{i}_re", f"z{i}_im", f"v{i}_re", f"v{i}_im"]
    if with_frames:
        for name in ("F", "G"):
            for k in range(n):
                cols += [f"{name}{k}_re", f"{name}{k}_im"]
    cols += ["F_drift", "energy_drift", "min_separation"]
    return cols


def trajectory_rows(traj):
    n = traj.spec.n
    for smp in traj.samples:
        row = [smp.state.t]
        for i in range(n):
            row += [smp.state.z[i].real, smp.state.z[i].imag,
                    smp.state.v[i].real, smp.state.v[i].imag]
        if smp.frame is not None:
            for vals in (smp.frame.F, smp.frame.G):
                for c in vals:
                    row += [c.real, c.imag]
        row += [smp.F_drift, smp.energy_drift, smp.min_separation]
        yield [float(x) for x in row]


def write_trajectory_csv(path: Path, traj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with_frames = bool(traj.samples) and traj.samples[0].frame is not None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(trajectory_header(traj.spec.n, with_frames))
        for row in trajectory_rows(traj):
            w.writerow([format(x, FLOAT_FMT) for x in row])


def read_trajectory_csv(path):
    """Parse a trajectory CSV back into ``(header, rows of floats)``."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(x) for x in row] for row in r]
    return header, rows


def _out_dir(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    env = os.environ.get("LAXLAB_OUT_DIR")
    return Path(env) if env else Path.cwd()


def _resolve(out_dir: Path, name: str | None, default: str) -> Path:
    p = Path(name if name else default)
    return p if p.is_absolute() else out_dir / p


def _say(args, msg):
    if not args.quiet:
        print(msg)


def cmd_run(cfg: RunConfig, args, stem: str) -> int:
    traj = integrate(cfg.spec, cfg.initial, cfg.integrator)
    out = _out_dir(args)
    csv_path = _resolve(out, cfg.outputs.get("trajectory_csv"), f"{stem}_trajectory.csv")
    rep_path = _resolve(out, cfg.outputs.get("report_json"), f"{stem}_report.json")
    write_trajectory_csv(csv_path, traj)
    last = traj.samples[-1]
    report = {
        "command": "run",
        "spec": cfg.spec.to_dict(),
        "samples": len(traj.samples),
        "t_final": last.state.t,
        "F_drift_max": traj.F_drift_max,
        "energy_drift_max": traj.energy_drift_max,
        "min_separation": traj.min_separation,
        "final": {"F_drift": last.F_drift, "energy_drift": last.energy_drift,
                  "min_separation": last.min_separation},
        "steps": dict(traj.stats),
        "error": traj.error,
    }
    write_json(rep_path, report)
    if traj.error is not None:
        print(f"laxlab: collision: {traj.error['message']}", file=sys.stderr)
        return EXIT_COLLISION
    _say(args, f"run: {len(traj.samples)} samples, F_drift_max={traj.F_drift_max:.3e}, "
               f"wrote {csv_path} and {rep_path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args, stem: str) -> int:
    if not cfg.verify:
        raise ConfigError("verify: config names no checks")
    results = [run_check(name, cfg.spec, cfg.initial, cfg.integrator, seed=cfg.seed)
               for name in cfg.verify]
    all_ok = all(r.passed for r in results)
    report = {"command": "verify", "spec": cfg.spec.to_dict(), "seed": cfg.seed,
              "passed": all_ok, "checks": [r.to_dict() for r in results]}
    rep_path = _resolve(_out_dir(args), cfg.outputs.get("report_json"), f"{stem}_verify.json")
    write_json(rep_path, report)
    for r in results:
        _say(args, f"{'PASS' if r.passed else 'FAIL'} {r.name}: "
                   f"measured={r.measured:.3e} threshold={r.threshold:.1e}")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_solve(cfg: RunConfig, args, stem: str) -> int:
    times = args.times
    spec = cfg.spec
    sol = make_solution(spec, cfg.initial)
    rows = []
    for t in times:
        pos = spectral_positions(sol, t)
        if spec.family is Family.RS_PERTURBED:
            if t < 0:
                raise ConfigError("RS_PERTURBED G evolution needs t >= 0")
            G = evolve_G_perturbed(sol, t)
        else:
            G = evolve_G(sol, t)
        row = {"t": t, "positions": pos, "G": G}
        if args.verify_against_oracle:
            if t < 0:
                raise ConfigError("oracle comparison needs t >= 0")
            if t == 0:
                oz, oG = cfg.initial.z, np.array(sol.G0)
            else:
                o = IntegratorOptions(t_end=t, sample_every=t, atol=cfg.integrator.atol,
                                      rtol=cfg.integrator.rtol)
                traj = integrate(spec, cfg.initial, o)
                if traj.error is not None:
                    raise CollisionError(*traj.error["pair"], 0.0, traj.error["t"])
                oz, oG = traj.samples[-1].state.z, np.array(traj.samples[-1].frame.G)
            row["oracle"] = {
                "positions": oz,
                "position_residual": float(np.max(np.abs(
                    canonical_order(pos) - canonical_order(oz)))),
                "G_residual": float(np.max(np.abs(G - oG) / np.maximum(1.0, np.abs(oG)))),
            }
        rows.append(row)
    report = {"command": "solve", "spec": cfg.spec.to_dict(), "times": rows}
    rep_path = _resolve(_out_dir(args), cfg.outputs.get("report_json"), f"{stem}_solve.json")
    write_json(rep_path, report)
    _say(args, f"solve: {len(times)} time(s), wrote {rep_path}")
    return EXIT_OK


def _parse_times(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --times list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("--times needs at least one value")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None,
                        help="output directory (default: $LAXLAB_OUT_DIR or cwd)")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines")
    p = argparse.ArgumentParser(prog="laxlab", parents=[common],
                                description="Integrable N-body linearization lab")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="integrate and write CSV + report")
    r.add_argument("config")
    v = sub.add_parser("verify", parents=[common], help="run the named checks")
    v.add_argument("config")
    s = sub.add_parser("solve", parents=[common], help="closed-form solution at given times")
    s.add_argument("config")
    s.add_argument("--times", type=_parse_times, required=True,
                   help="comma-separated list of times")
    s.add_argument("--verify-against-oracle", action="store_true",
                   help="compare with the ODE oracle at each time")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        stem = Path(args.config).stem
        handler = {"run": cmd_run, "verify": cmd_verify, "solve": cmd_solve}[args.command]
        return handler(cfg, args, stem)
    except ConfigError as exc:
        print(f"laxlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CollisionError as exc:
        print(f"laxlab: collision: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except IntegrationError as exc:
        print(f"laxlab: integrator failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except UnsupportedFamilyError as exc:
        print(f"laxlab: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
