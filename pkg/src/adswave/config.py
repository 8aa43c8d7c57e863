"""Plain-text run configuration: flat INI sections [model], [solver], [scan].

Unknown keys, type errors and invariant violations are reported with
their key path.  A resolved config (defaults applied) serializes
canonically, so its SHA-256 digest identifies the run; serializing and
re-parsing a resolved config is the identity.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass

import numpy as np

from .params import ModelParams, ParamError

_MODEL_KEYS = {
    "c": 1.0, "h": 1.0, "b": 0.0, "m2": 0.0, "p": 2.0, "beta": 0.0,
    "mu": 1.0, "varsigma": 0.0, "varrho": "critical", "n": 1, "r": 1.0,
}
# mu and varsigma defaults are tool choices, no canonical values exist
_SOLVER_KEYS = {
    "solver": "fd", "dx": 0.04, "slab": 0.05, "tol": 1e-6,
    "cap": "auto", "t_horizon": "auto", "n_frames": 601,
}
_SCAN_KEYS = {
    "eps_max": 1e-1, "eps_min": 1e-3, "eps_points": 12, "margin": 0.15,
}


class ConfigError(ValueError):
    pass


@dataclass
class ResolvedConfig:
    model: dict
    solver: dict
    scan: dict

    @property
    def mp(self) -> ModelParams:
        m = self.model
        varrho = 0.0 if m["varrho"] == "critical" else float(m["varrho"])
        return ModelParams(c=m["c"], H=m["h"], b=m["b"], m2=m["m2"], p=m["p"],
                           beta=m["beta"], mu=m["mu"], varsigma=m["varsigma"],
                           varrho=varrho, n=m["n"], R=m["r"])

    @property
    def gamma_mode(self) -> str:
        return "critical" if self.model["varrho"] == "critical" else "explicit"

    def epsilons(self) -> np.ndarray:
        s = self.scan
        return np.geomspace(s["eps_max"], s["eps_min"], int(s["eps_points"]))

    def serialize(self) -> str:
        out = io.StringIO()
        for section, keys in (("model", self.model), ("solver", self.solver),
                              ("scan", self.scan)):
            out.write(f"[{section}]\n")
            for k in sorted(keys):
                v = keys[k]
                if isinstance(v, float):
                    out.write(f"{k} = {v:.17g}\n")
                else:
                    out.write(f"{k} = {v}\n")
            out.write("\n")
        return out.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()


def _coerce(section: str, key: str, raw, default):
    try:
        if isinstance(default, bool):
            return str(raw).lower() in ("1", "true", "yes")
        if isinstance(default, int) and not isinstance(default, bool):
            return int(str(raw))
        if isinstance(default, float):
            return float(str(raw))
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _read_section(cp, name: str, schema: dict) -> dict:
    out = dict(schema)
    if not cp.has_section(name):
        return out
    for key, raw in cp.items(name):
        k = key.lower()
        if k not in schema:
            raise ConfigError(f"[{name}] {key}: unknown key")
        default = schema[k]
        if k in ("varrho", "cap", "t_horizon") and str(raw).strip() in (
                "critical", "auto"):
            out[k] = str(raw).strip()
        else:
            ref = 0.0 if k in ("varrho", "cap", "t_horizon") else default
            out[k] = _coerce(name, key, raw, ref)
    return out


def parse_config(path: str) -> ResolvedConfig:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section in cp.sections():
        if section not in ("model", "solver", "scan"):
            raise ConfigError(f"[{section}]: unknown section")
    rc = ResolvedConfig(model=_read_section(cp, "model", _MODEL_KEYS),
                        solver=_read_section(cp, "solver", _SOLVER_KEYS),
                        scan=_read_section(cp, "scan", _SCAN_KEYS))
    try:
        rc.mp  # eager invariant validation
    except ParamError as exc:
        raise ConfigError("; ".join(f"[model] {v}" for v in exc.violations)) from exc
    if rc.solver["solver"] not in ("fd", "duhamel"):
        raise ConfigError(f"[solver] solver: must be fd or duhamel")
    if not rc.scan["eps_max"] > rc.scan["eps_min"] > 0:
        raise ConfigError("[scan] eps_max > eps_min > 0 required")
    return rc


def parse_resolved(text: str) -> ResolvedConfig:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    return ResolvedConfig(model=_read_section(cp, "model", _MODEL_KEYS),
                          solver=_read_section(cp, "solver", _SOLVER_KEYS),
                          scan=_read_section(cp, "scan", _SCAN_KEYS))


def require_above_double_critical(rc: ResolvedConfig) -> None:
    """Lifespan-style subcommands refuse varsigma <= -1/p: no bound is
    proved in the double-critical corner, the tool does not extrapolate."""
    ss, p = rc.model["varsigma"], rc.model["p"]
    if ss <= -1.0 / p + 1e-15:
        raise ConfigError(
            f"[model] varsigma = {ss} <= -1/p = {-1.0 / p}: the "
            "double-critical case is refused for lifespan subcommands")
