"""Strict JSON run configuration.

Schema (complex numbers are ``[re, im]`` pairs; a bare number means a real
value)::

    {
      "system":     {"family": "CM_RATIONAL", "n": 2, "g": [1, 0],
                     "lambda": ..., "a": ..., "r": ..., "mu": ...,
                     "Omega": 1.0, "rs_case": "v", "collision_epsilon": 1e-8},
      "initial":    {"t": 0.0, "z": [[re, im], ...], "v": [[re, im], ...]},
      "integrator": {"method": "RK45_ADAPTIVE", "t_end": 5.0,
                     "sample_every": 0.1, "atol": 1e-10, "rtol": 1e-10,
                     "h": null},
      "outputs":    {"trajectory_csv": "traj.csv", "report_json": "report.json"},
      "verify":     ["conservation", "lax_residual"],
      "seed":       0
    }

Unknown keys anywhere are rejected.  Only ``system``, ``initial`` and
``integrator`` are required.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .integrate import IntegratorOptions
from .systems import PhaseState, SystemSpec

__all__ = ["RunConfig", "load_config", "parse_config", "parse_complex"]

_TOP = {"system", "initial", "integrator", "outputs", "verify", "seed"}
_SYSTEM = {"family", "n", "g", "lambda", "a", "r", "mu", "Omega", "rs_case",
           "collision_epsilon"}
_INITIAL = {"t", "z", "v"}
_INTEGRATOR = {"method", "t_end", "sample_every", "atol", "rtol", "h", "max_steps"}
_OUTPUTS = {"trajectory_csv", "report_json"}


@dataclass(frozen=True)
class RunConfig:
    spec: SystemSpec
    initial: PhaseState
    integrator: IntegratorOptions
    outputs: dict = field(default_factory=dict)
    verify: tuple = ()
    seed: int = 0


def parse_complex(value, where="value") -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or an [re, im] pair, got {value!r}")


def _strict(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")


def parse_config(raw: dict) -> RunConfig:
    _strict(raw, _TOP, "config")
    for key in ("system", "initial", "integrator"):
        if key not in raw:
            raise ConfigError(f"config: missing required section {key!r}")
    sysd = raw["system"]
    _strict(sysd, _SYSTEM, "system")
    if "family" not in sysd or "n" not in sysd:
        raise ConfigError("system: 'family' and 'n' are required")
    n = sysd["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"system.n must be a positive integer, got {n!r}")
    kwargs = {"family": sysd["family"], "n": n}
    for src, dst in (("g", "g"), ("lambda", "lam"), ("a", "a"), ("r", "r"), ("mu", "mu")):
        if src in sysd:
            kwargs[dst] = parse_complex(sysd[src], f"system.{src}")
    if "Omega" in sysd:
        om = sysd["Omega"]
        if not isinstance(om, (int, float)) or isinstance(om, bool):
            raise ConfigError("system.Omega must be a real number")
        kwargs["Omega"] = float(om)
    if "rs_case" in sysd:
        kwargs["rs_case"] = sysd["rs_case"]
    if "collision_epsilon" in sysd:
        kwargs["collision_epsilon"] = float(sysd["collision_epsilon"])
    try:
        spec = SystemSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from None

    ini = raw["initial"]
    _strict(ini, _INITIAL, "initial")
    for key in ("z", "v"):
        if key not in ini or not isinstance(ini[key], list):
            raise ConfigError(f"initial.{key} must be a list")
        if len(ini[key]) != n:
            raise ConfigError(f"initial.{key} has {len(ini[key])} entries, expected {n}")
    z = [parse_complex(x, f"initial.z[{i}]") for i, x in enumerate(ini["z"])]
    v = [parse_complex(x, f"initial.v[{i}]") for i, x in enumerate(ini["v"])]
    try:
        state = PhaseState(float(ini.get("t", 0.0)), z, v)
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from None

    integ = raw["integrator"]
    _strict(integ, _INTEGRATOR, "integrator")
    try:
        opts = IntegratorOptions(**integ)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"integrator: {exc}") from None

    outputs = raw.get("outputs", {})
    _strict(outputs, _OUTPUTS, "outputs")
    for key, val in outputs.items():
        if not isinstance(val, str) or not val:
            raise ConfigError(f"outputs.{key} must be a non-empty path string")

    verify = raw.get("verify", [])
    if not isinstance(verify, list) or not all(isinstance(x, str) for x in verify):
        raise ConfigError("verify must be a list of check names")
    from .checks import CHECKS

    unknown = [x for x in verify if x not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check name(s) {unknown}; known: {sorted(CHECKS)}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    return RunConfig(spec=spec, initial=state, integrator=opts, outputs=dict(outputs),
                     verify=tuple(verify), seed=seed)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(raw)
