"""Domain types and pure energy-flow arithmetic for fleets, batteries, UPS, generator.

Everything here is a plain immutable value; operations are pure functions that
return new states. Units are carried in field names: watts (_w), watt-hours
(_wh), hours (_h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

USERS_PER_SERVER = 25  # one server hosts VMs for up to 25 users


class DeviceClass(Enum):
    LAPTOP = "laptop"
    DESKTOP = "desktop"
    SERVER = "server"
    SWITCH = "switch"


@dataclass(frozen=True)
class DeviceClassSpec:
    """A device class in a fleet: per-unit draw and how many units."""

    device_class: DeviceClass
    unit_draw_w: float
    count: int

    def __post_init__(self):
        if self.unit_draw_w < 0:
            raise ValueError("unit_draw_w must be >= 0")
        if self.count < 0:
            raise ValueError("count must be >= 0")


@dataclass(frozen=True)
class FleetSpec:
    """Device classes making up one office fleet."""

    classes: tuple[DeviceClassSpec, ...]
    users: int

    def __post_init__(self):
        if self.users < 1:
            raise ValueError("users must be >= 1")
        seen = set()
        for spec in self.classes:
            # one entry per class keeps fleet_load subsets unambiguous
            if spec.device_class in seen:
                raise ValueError(f"duplicate device class {spec.device_class.value}")
            seen.add(spec.device_class)

    def count_of(self, device_class: DeviceClass) -> int:
        for spec in self.classes:
            if spec.device_class == device_class:
                return spec.count
        return 0


def anyware_fleet(
    users: int,
    laptop_draw_w: float,
    server_draw_w: float,
    switch_draw_w: float,
    switch_count: int = 1,
) -> FleetSpec:
    """Laptop fleet backed by a shared server cluster: one laptop per user,
    one server per 25 users (rounded up), plus network switches."""
    servers = math.ceil(users / USERS_PER_SERVER)
    return FleetSpec(
        classes=(
            DeviceClassSpec(DeviceClass.LAPTOP, laptop_draw_w, users),
            DeviceClassSpec(DeviceClass.SERVER, server_draw_w, servers),
            DeviceClassSpec(DeviceClass.SWITCH, switch_draw_w, switch_count),
        ),
        users=users,
    )


def desktop_fleet(
    users: int,
    desktop_draw_w: float,
    switch_draw_w: float,
    switch_count: int = 1,
) -> FleetSpec:
    """Traditional fleet: one desktop per user plus network switches.

    Compute happens on the desktops themselves, so there is no server entry.
    """
    return FleetSpec(
        classes=(
            DeviceClassSpec(DeviceClass.DESKTOP, desktop_draw_w, users),
            DeviceClassSpec(DeviceClass.SWITCH, switch_draw_w, switch_count),
        ),
        users=users,
    )


def fleet_load(fleet: FleetSpec, subset: Optional[Iterable[DeviceClass]] = None) -> float:
    """Total draw in watts of the given device classes (all classes if None).

    Classes absent from the fleet contribute 0; an empty subset sums to 0.
    """
    if subset is None:
        return sum(s.unit_draw_w * s.count for s in fleet.classes)
    wanted = set(subset)
    return sum(s.unit_draw_w * s.count for s in fleet.classes if s.device_class in wanted)


@dataclass(frozen=True)
class BatterySpec:
    """Battery sizing: capacity, charge rate, and the backup-hours alias.

    capacity_wh = backup_hours x rated load, fixed at construction; use
    for_load() to build one from a rated load.
    """

    capacity_wh: float
    charge_power_w: float
    backup_hours: float

    def __post_init__(self):
        if self.capacity_wh < 0:
            raise ValueError("capacity_wh must be >= 0")
        if self.charge_power_w < 0:
            raise ValueError("charge_power_w must be >= 0")
        if self.backup_hours < 0:
            raise ValueError("backup_hours must be >= 0")

    @classmethod
    def for_load(
        cls,
        rated_load_w: float,
        backup_hours: float,
        charge_power_w: Optional[float] = None,
    ) -> "BatterySpec":
        """Size a battery to run rated_load_w for backup_hours.

        Default charge power equals the rated load (symmetric
        charge/discharge), so a 3-hour battery refills in 3 mains hours.
        """
        if rated_load_w < 0:
            raise ValueError("rated_load_w must be >= 0")
        if charge_power_w is None:
            charge_power_w = rated_load_w
        return cls(
            capacity_wh=backup_hours * rated_load_w,
            charge_power_w=charge_power_w,
            backup_hours=backup_hours,
        )


@dataclass(frozen=True)
class BatteryState:
    """A battery and its current charge; 0 <= charge <= capacity always."""

    spec: BatterySpec
    charge_wh: float

    def __post_init__(self):
        if not 0 <= self.charge_wh <= self.spec.capacity_wh:
            raise ValueError("charge_wh out of [0, capacity]")

    @classmethod
    def full(cls, spec: BatterySpec) -> "BatteryState":
        return cls(spec=spec, charge_wh=spec.capacity_wh)


def battery_serve(
    state: BatteryState, load_w: float, dt_h: float
) -> tuple[float, BatteryState, bool]:
    """Try to serve load_w for dt_h from the battery, whole-interval rule.

    The battery covers the interval only if it can cover all of it; otherwise
    it serves nothing and the interval falls to the next source. Returns
    (served_wh, new state, covered_full_interval).
    """
    if load_w < 0:
        raise ValueError("load_w must be >= 0")
    if dt_h <= 0:
        raise ValueError("dt_h must be > 0")
    need_wh = load_w * dt_h
    if state.charge_wh >= need_wh:
        return need_wh, replace(state, charge_wh=state.charge_wh - need_wh), True
    return 0.0, state, False


def battery_recharge(state: BatteryState, dt_h: float) -> tuple[float, BatteryState]:
    """Recharge for dt_h at the spec's charge power, clamped at capacity.

    Returns (drawn_from_source_wh, new state). Charging is lossless; the drawn
    energy equals the charge gained.
    """
    if dt_h <= 0:
        raise ValueError("dt_h must be > 0")
    drawn_wh = min(state.spec.charge_power_w * dt_h, state.spec.capacity_wh - state.charge_wh)
    return drawn_wh, replace(state, charge_wh=state.charge_wh + drawn_wh)


@dataclass(frozen=True)
class UpsSpec:
    """UPS overhead model plus its battery sizing.

    Overhead is proportional to attached load; the coefficient is calibrated
    so a full fleet yields the nominal overhead figure (96 W at 876 W).
    """

    overhead_coefficient: float
    battery: BatterySpec

    def __post_init__(self):
        if self.overhead_coefficient < 0:
            raise ValueError("overhead_coefficient must be >= 0")


def ups_overhead(spec: UpsSpec, attached_load_w: float) -> float:
    """Extra watts the UPS draws beyond its attached load."""
    if attached_load_w < 0:
        raise ValueError("attached_load_w must be >= 0")
    return spec.overhead_coefficient * attached_load_w


@dataclass(frozen=True)
class GeneratorSpec:
    """Backup generator: unbounded capacity, weighted-energy overhead, fuel rate.

    overhead_factor multiplies generator watt-hours in the weighted-energy
    metric; it does not appear in the electrical ledger.
    """

    overhead_factor: float = 1.5
    fuel_rate: float = 1.0

    def __post_init__(self):
        if self.overhead_factor < 1:
            raise ValueError("overhead_factor must be >= 1")
        if self.fuel_rate < 0:
            raise ValueError("fuel_rate must be >= 0")
