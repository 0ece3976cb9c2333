"""Scenario configuration: defaults, TOML loading, validation.

The TOML schema mirrors ScenarioConfig field for field:

    [fleet]      users, laptop_draw_w, desktop_draw_w, server_draw_w,
                 switch_draw_w, switch_count
    [battery]    laptop_backup_hours, laptop_backup_overrides,
                 ups_backup_hours, laptop_charge_w, ups_charge_w,
                 instant_recharge
    [ups]        overhead_mode ("proportional" | "fixed"), overhead_w
    [generator]  overhead_factor, fuel_rate
    [outage]     kind ("bernoulli" | "scheduled" | "trace"), p,
                 windows ([[start, end], ...] daily outage hours),
                 trace_path
    [simulation] horizon_hours, replications, base_seed, architecture,
                 laptop_depletion_policy

An empty file yields the pure defaults: 25 users at 24/165/270/6 W draws,
96 W UPS overhead anchor, 3 h batteries, horizon 720 h, 1000 replications,
seed 42, g = 1.5, fuel rate 1.0, Bernoulli p = 0.5, anyware_dc,
start_generator. Unknown keys are rejected; domain violations name the
offending field.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .archsim import ArchKind, LaptopDepletionPolicy
from .outage import Bernoulli, OutagePolicy, Scheduled, load_trace


class ConfigError(ValueError):
    """Configuration file or field rejected."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully-resolved simulation scenario."""

    users: int = 25
    laptop_draw_w: float = 24.0
    desktop_draw_w: float = 165.0
    server_draw_w: float = 270.0
    switch_draw_w: float = 6.0
    switch_count: int = 1

    laptop_backup_hours: float = 3.0
    laptop_backup_overrides: Optional[tuple[float, ...]] = None
    ups_backup_hours: float = 3.0
    laptop_charge_w: Optional[float] = None  # None = laptop draw (symmetric)
    ups_charge_w: Optional[float] = None  # None = full-fleet rated load
    instant_recharge: bool = False

    ups_overhead_mode: str = "proportional"
    ups_overhead_w: float = 96.0

    generator_overhead_factor: float = 1.5
    generator_fuel_rate: float = 1.0

    outage_kind: str = "bernoulli"
    outage_p: float = 0.5
    outage_windows: tuple[tuple[float, float], ...] = ()
    outage_trace_path: Optional[str] = None

    horizon_hours: int = 720
    replications: int = 1000
    base_seed: int = 42
    architecture: ArchKind = ArchKind.ANYWARE_DC
    laptop_depletion_policy: LaptopDepletionPolicy = LaptopDepletionPolicy.START_GENERATOR

    def __post_init__(self):
        _validate(self)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _validate(cfg: ScenarioConfig) -> None:
    _require(cfg.users >= 1, "fleet.users out of [1, inf)")
    _require(cfg.laptop_draw_w >= 0, "fleet.laptop_draw_w out of [0, inf)")
    _require(cfg.desktop_draw_w >= 0, "fleet.desktop_draw_w out of [0, inf)")
    _require(cfg.server_draw_w >= 0, "fleet.server_draw_w out of [0, inf)")
    _require(cfg.switch_draw_w >= 0, "fleet.switch_draw_w out of [0, inf)")
    _require(cfg.switch_count >= 0, "fleet.switch_count out of [0, inf)")

    _require(cfg.laptop_backup_hours >= 0, "battery.laptop_backup_hours out of [0, inf)")
    if cfg.laptop_backup_overrides is not None:
        _require(
            len(cfg.laptop_backup_overrides) == cfg.users,
            "battery.laptop_backup_overrides length must equal fleet.users",
        )
        _require(
            all(b >= 0 for b in cfg.laptop_backup_overrides),
            "battery.laptop_backup_overrides out of [0, inf)",
        )
    _require(cfg.ups_backup_hours >= 0, "battery.ups_backup_hours out of [0, inf)")
    if cfg.laptop_charge_w is not None:
        _require(cfg.laptop_charge_w >= 0, "battery.laptop_charge_w out of [0, inf)")
    if cfg.ups_charge_w is not None:
        _require(cfg.ups_charge_w >= 0, "battery.ups_charge_w out of [0, inf)")

    _require(
        cfg.ups_overhead_mode in ("proportional", "fixed"),
        "ups.overhead_mode must be 'proportional' or 'fixed'",
    )
    _require(cfg.ups_overhead_w >= 0, "ups.overhead_w out of [0, inf)")

    _require(cfg.generator_overhead_factor >= 1, "generator.overhead_factor out of [1, inf)")
    _require(cfg.generator_fuel_rate >= 0, "generator.fuel_rate out of [0, inf)")

    _require(
        cfg.outage_kind in ("bernoulli", "scheduled", "trace"),
        "outage.kind must be 'bernoulli', 'scheduled', or 'trace'",
    )
    _require(0 <= cfg.outage_p <= 1, "outage.p out of [0,1]")
    try:
        Scheduled(windows=tuple(cfg.outage_windows))
    except ValueError as exc:
        raise ConfigError(f"outage.windows: {exc}") from exc
    if cfg.outage_kind == "trace":
        _require(
            cfg.outage_trace_path is not None,
            "outage.trace_path required when outage.kind = 'trace'",
        )

    _require(cfg.horizon_hours >= 1, "simulation.horizon_hours out of [1, inf)")
    _require(cfg.replications >= 1, "simulation.replications out of [1, inf)")
    _require(cfg.base_seed >= 0, "simulation.base_seed out of [0, inf)")


def build_policy(config: ScenarioConfig) -> OutagePolicy:
    """Instantiate the outage policy a config describes.

    Trace files are read here, at run time; their errors are runtime errors,
    not config rejections.
    """
    if config.outage_kind == "bernoulli":
        return Bernoulli(p=config.outage_p)
    if config.outage_kind == "scheduled":
        return Scheduled(windows=config.outage_windows)
    return load_trace(config.outage_trace_path)


def _as_int(dotted: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{dotted} must be an integer")
    return value


def _as_float(dotted: str, value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{dotted} must be a number")
    return float(value)


def _as_bool(dotted: str, value: object) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{dotted} must be a boolean")
    return value


def _as_str(dotted: str, value: object) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{dotted} must be a string")
    return value


def _as_float_list(dotted: str, value: object) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{dotted} must be a list of numbers")
    return tuple(_as_float(dotted, v) for v in value)


def _as_windows(dotted: str, value: object) -> tuple[tuple[float, float], ...]:
    if not isinstance(value, list):
        raise ConfigError(f"{dotted} must be a list of [start, end] pairs")
    out = []
    for pair in value:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{dotted} must be a list of [start, end] pairs")
        out.append((_as_float(dotted, pair[0]), _as_float(dotted, pair[1])))
    return tuple(out)


def _as_architecture(dotted: str, value: object) -> ArchKind:
    names = [k.value for k in ArchKind]
    try:
        return ArchKind(_as_str(dotted, value))
    except ValueError:
        raise ConfigError(f"{dotted} must be one of {names}") from None


def _as_policy(dotted: str, value: object) -> LaptopDepletionPolicy:
    names = [k.value for k in LaptopDepletionPolicy]
    try:
        return LaptopDepletionPolicy(_as_str(dotted, value))
    except ValueError:
        raise ConfigError(f"{dotted} must be one of {names}") from None


# TOML section.key -> (ScenarioConfig field, converter)
_SCHEMA = {
    "fleet": {
        "users": ("users", _as_int),
        "laptop_draw_w": ("laptop_draw_w", _as_float),
        "desktop_draw_w": ("desktop_draw_w", _as_float),
        "server_draw_w": ("server_draw_w", _as_float),
        "switch_draw_w": ("switch_draw_w", _as_float),
        "switch_count": ("switch_count", _as_int),
    },
    "battery": {
        "laptop_backup_hours": ("laptop_backup_hours", _as_float),
        "laptop_backup_overrides": ("laptop_backup_overrides", _as_float_list),
        "ups_backup_hours": ("ups_backup_hours", _as_float),
        "laptop_charge_w": ("laptop_charge_w", _as_float),
        "ups_charge_w": ("ups_charge_w", _as_float),
        "instant_recharge": ("instant_recharge", _as_bool),
    },
    "ups": {
        "overhead_mode": ("ups_overhead_mode", _as_str),
        "overhead_w": ("ups_overhead_w", _as_float),
    },
    "generator": {
        "overhead_factor": ("generator_overhead_factor", _as_float),
        "fuel_rate": ("generator_fuel_rate", _as_float),
    },
    "outage": {
        "kind": ("outage_kind", _as_str),
        "p": ("outage_p", _as_float),
        "windows": ("outage_windows", _as_windows),
        "trace_path": ("outage_trace_path", _as_str),
    },
    "simulation": {
        "horizon_hours": ("horizon_hours", _as_int),
        "replications": ("replications", _as_int),
        "base_seed": ("base_seed", _as_int),
        "architecture": ("architecture", _as_architecture),
        "laptop_depletion_policy": ("laptop_depletion_policy", _as_policy),
    },
}


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate a TOML scenario file; empty file = pure defaults."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    kwargs = {}
    for section, table in data.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config key: {section}")
        if not isinstance(table, dict):
            raise ConfigError(f"unknown config key: {section}")
        for key, value in table.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key: {section}.{key}")
            field_name, convert = _SCHEMA[section][key]
            kwargs[field_name] = convert(f"{section}.{key}", value)
    return ScenarioConfig(**kwargs)


def config_items(config: ScenarioConfig) -> list[tuple[str, object]]:
    """(dotted key, value) for every config field, in schema order.

    Used for the provenance header of result files.
    """
    by_field = {
        field_name: f"{section}.{key}"
        for section, table in _SCHEMA.items()
        for key, (field_name, _) in table.items()
    }
    out = []
    for f in fields(ScenarioConfig):
        value: object = getattr(config, f.name)
        if isinstance(value, (ArchKind, LaptopDepletionPolicy)):
            value = value.value
        out.append((by_field[f.name], value))
    return out
