"""Run configuration: key-value config files and resolved-config echoes.

The config file format is plain text, one `key = value` per line, with
`#` comments.  Polynomial values are space-separated coefficients of
x^1, x^2, ... (the constant term is always zero).  Unknown keys are
rejected with a line diagnostic.  Every run echoes its fully resolved
configuration so that reports re-run bit-identically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .functionals import MollifierSpec, reference_spec
from .kernels import KernelConfig, default_G
from .poly import Polynomial

MODES = (
    "reproduce",
    "optimize",
    "scan",
    "sweep",
    "kernels",
    "characters",
    "lfun",
    "kloosterman",
)


def _parse_float_list(text: str) -> list[float]:
    parts = text.replace(",", " ").split()
    return [float(p) for p in parts]


# key -> parser
KNOWN_KEYS: dict[str, Any] = {
    "theta1": float,
    "theta2": float,
    "theta3": float,
    "p1": _parse_float_list,
    "p2": _parse_float_list,
    "p3": _parse_float_list,
    "kernel_pole_kill": int,
    "kernel_t_cutoff": float,
    "kernel_step": float,
    "contour_sigma": float,
    "tail_tolerance": float,
    "interp_tolerance": float,
    "vanish_threshold": float,
    "Q": float,
    "stride": int,
    "workers": int,
    "seed": int,
}


def parse_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = KNOWN_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return out


def validate_overrides(overrides: dict[str, Any]) -> dict[str, Any]:
    """Typed validation of an in-memory key-value map (service requests)."""
    out: dict[str, Any] = {}
    for key, value in overrides.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        parser = KNOWN_KEYS[key]
        try:
            if parser is _parse_float_list:
                out[key] = [float(v) for v in value]
            else:
                out[key] = parser(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    return out


def spec_from_config(cfg: dict[str, Any]) -> MollifierSpec:
    """Mollifier spec from config keys, defaulting to the reference one."""
    ref = reference_spec()
    def poly(key: str, default: Polynomial) -> Polynomial:
        if key in cfg:
            return Polynomial([0.0, *cfg[key]])
        return default

    return MollifierSpec(
        theta1=cfg.get("theta1", ref.theta1),
        theta2=cfg.get("theta2", ref.theta2),
        theta3=cfg.get("theta3", ref.theta3),
        p1=poly("p1", ref.p1),
        p2=poly("p2", ref.p2),
        p3=poly("p3", ref.p3),
    )


def kernel_config_from(cfg: dict[str, Any]) -> KernelConfig:
    kill = cfg.get("kernel_pole_kill", 2)
    return KernelConfig(
        g=default_G(kill),
        contour_sigma=cfg.get("contour_sigma", 1.0),
        t_cutoff=cfg.get("kernel_t_cutoff", 60.0),
        step=cfg.get("kernel_step", 1.0 / 64),
        pole_kill_count=kill,
    )


def resolved_config(spec: MollifierSpec, cfg: dict[str, Any]) -> dict[str, Any]:
    """The fully resolved key-value map echoed into every report."""
    out = {
        "theta1": spec.theta1,
        "theta2": spec.theta2,
        "theta3": spec.theta3,
        "p1": list(spec.p1.coeffs[1:]),
        "p2": list(spec.p2.coeffs[1:]),
        "p3": list(spec.p3.coeffs[1:]),
        "kernel_pole_kill": cfg.get("kernel_pole_kill", 2),
        "kernel_t_cutoff": cfg.get("kernel_t_cutoff", 60.0),
        "kernel_step": cfg.get("kernel_step", 1.0 / 64),
        "contour_sigma": cfg.get("contour_sigma", 1.0),
        "tail_tolerance": cfg.get("tail_tolerance", 1e-9),
        "interp_tolerance": cfg.get("interp_tolerance", 1e-9),
        "vanish_threshold": cfg.get("vanish_threshold", 1e-8),
        "seed": cfg.get("seed", 0),
    }
    for key in ("Q", "stride", "workers"):
        if key in cfg:
            out[key] = cfg[key]
    return out


@dataclass
class RunConfig:
    """One fully described run: mode plus mode-specific parameters."""

    mode: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
