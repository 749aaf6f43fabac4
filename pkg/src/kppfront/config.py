"""Run-configuration parsing for the batch front end.

Grammar: one ``key = value`` pair per line; blank lines and ``#`` comments
ignored.  Values are floats, integers, strings, or comma-separated float
lists depending on the key; every key is echoed back by ``serialize`` so
a config round-trips unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

COMMANDS = (
    "semiwave",
    "wave",
    "elliptic",
    "simulate",
    "classify",
    "threshold",
    "sweep",
    "convergence",
)


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    # problem parameters
    c: float | None = None
    mu: float | None = None
    h0: float | None = None
    # initial data
    family: str = "sine"
    sigma: float | None = None
    shift: float = 0.0
    scale: float = 1.0
    data_csv: str | None = None
    # numerics
    N: int = 400
    T_max: float = 50.0
    H_floor: float | None = None
    dt_max: float | None = None
    dt_fixed: float | None = None
    snapshot_times: tuple[float, ...] = ()
    backend: str = "auto"
    tol: float = 1e-9
    # classification
    tol_trans: float = 0.1
    margin: float | None = None
    poll_dt: float | None = None
    # threshold search
    sigma_lo: float | None = None
    sigma_hi: float | None = None
    max_iter: int = 40
    rel_width: float = 1e-2
    probe: bool = True
    # sweep
    c_list: tuple[float, ...] = ()
    mu_list: tuple[float, ...] = ()
    sigma_list: tuple[float, ...] = ()
    workers: int = 1
    # elliptic profile
    drift: float | None = None
    half_length: float | None = None
    # convergence study
    levels: int = 3
    mode: str = "selfconv"
    # reporting
    window: float = 0.5
    out: str | None = None
    name: str | None = None


_TYPES: dict[str, str] = {
    "command": "str",
    "c": "float",
    "mu": "float",
    "h0": "float",
    "family": "str",
    "sigma": "float",
    "shift": "float",
    "scale": "float",
    "data_csv": "str",
    "N": "int",
    "T_max": "float",
    "H_floor": "float",
    "dt_max": "float",
    "dt_fixed": "float",
    "snapshot_times": "floats",
    "backend": "str",
    "tol": "float",
    "tol_trans": "float",
    "margin": "float",
    "poll_dt": "float",
    "sigma_lo": "float",
    "sigma_hi": "float",
    "max_iter": "int",
    "rel_width": "float",
    "probe": "bool",
    "c_list": "floats",
    "mu_list": "floats",
    "sigma_list": "floats",
    "workers": "int",
    "drift": "float",
    "half_length": "float",
    "levels": "int",
    "mode": "str",
    "window": "float",
    "out": "str",
    "name": "str",
}

_POSITIVE = {
    "c",
    "mu",
    "h0",
    "sigma",
    "N",
    "T_max",
    "H_floor",
    "dt_max",
    "dt_fixed",
    "tol",
    "tol_trans",
    "sigma_lo",
    "sigma_hi",
    "max_iter",
    "rel_width",
    "half_length",
    "levels",
    "workers",
    "scale",
    "window",
    "poll_dt",
    "margin",
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "semiwave": ("mu",),
    "wave": ("c", "mu"),
    "elliptic": ("drift", "half_length"),
    "simulate": ("c", "mu", "h0"),
    "classify": ("c", "mu", "h0"),
    "threshold": ("c", "mu", "h0", "sigma_lo", "sigma_hi"),
    "sweep": ("h0", "c_list", "mu_list", "sigma_list"),
    "convergence": ("c", "mu", "h0"),
}


def _parse_value(key: str, raw: str) -> Any:
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            val = int(raw)
            return val
        if kind == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            if not raw:
                return ()
            return tuple(float(tok) for tok in raw.split(","))
        return raw
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {kind}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate; unknown keys, missing required keys, and
    non-positive numerics are reported with the key name."""
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)

    if "command" not in values:
        raise ConfigError("missing required key 'command'")
    command = values["command"]
    if command not in COMMANDS:
        raise ConfigError(f"key 'command': unknown command {command!r}")

    for key in _REQUIRED[command]:
        if key not in values or values[key] in (None, ()):
            raise ConfigError(f"missing required key {key!r} for command {command!r}")

    for key, val in values.items():
        if key in _POSITIVE and val is not None:
            vals = val if isinstance(val, tuple) else (val,)
            for v in vals:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    continue
                if v <= 0:
                    raise ConfigError(f"key {key!r} must be positive, got {v!r}")

    if values.get("family", "sine") not in ("sine", "bump", "compact-wave", "custom"):
        raise ConfigError(f"key 'family': unknown family {values['family']!r}")
    if values.get("mode", "selfconv") not in ("selfconv", "manufactured"):
        raise ConfigError(f"key 'mode': unknown mode {values['mode']!r}")

    return RunConfig(**values)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical echo: every non-None field in declaration order."""
    lines = []
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if val is None:
            continue
        if isinstance(val, tuple):
            if not val:
                continue
            rendered = ", ".join(repr(float(v)) for v in val)
        elif isinstance(val, bool):
            rendered = "true" if val else "false"
        elif isinstance(val, float):
            rendered = repr(val)
        else:
            rendered = str(val)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"
