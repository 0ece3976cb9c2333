"""Hourly engine and the four architecture controllers.

Each architecture routes its fleet's load to mains, batteries, or the backup
generator once per hour:

  * desktop      - desktops + switch on mains; generator on outage.
  * anyware      - laptops + server cluster on mains; generator on outage
                   (the unmodified comparator, generator-backed so it keeps
                   running).
  * anyware_ups  - the whole Anyware fleet behind a UPS; battery rides out
                   outages whole hours at a time, generator when it cannot.
  * anyware_dc   - UPS carries only servers + switches; laptops ride outages
                   on their own batteries. The generator starts when the UPS
                   cannot cover its hour, or (StartGenerator policy) when any
                   laptop cannot; under IdleWait depleted laptops draw zero
                   and wait.

Batteries recharge from mains only; while the generator runs it carries the
whole fleet and batteries stay untouched. UPS overhead accrues whenever the
UPS is active (mains and battery hours), never on generator hours; the
generator's inefficiency lives in the weighted-energy metric, not here.

step() is the readable single-hour reference; bulk simulation goes through
kernels.simulate_batch, which implements identical arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np

from . import kernels
from .fleet import (
    BatterySpec,
    BatteryState,
    DeviceClass,
    FleetSpec,
    GeneratorSpec,
    UpsSpec,
    anyware_fleet,
    battery_recharge,
    battery_serve,
    desktop_fleet,
    fleet_load,
)
from .outage import availability_bits

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig
    from .metrics import SummaryStats


class ArchKind(Enum):
    DESKTOP = "desktop"
    ANYWARE = "anyware"
    ANYWARE_UPS = "anyware_ups"
    ANYWARE_DC = "anyware_dc"


class LaptopDepletionPolicy(Enum):
    START_GENERATOR = "start_generator"
    IDLE_WAIT = "idle_wait"


ARCH_IDS = {
    ArchKind.DESKTOP: kernels.ARCH_DESKTOP,
    ArchKind.ANYWARE: kernels.ARCH_ANYWARE,
    ArchKind.ANYWARE_UPS: kernels.ARCH_ANYWARE_UPS,
    ArchKind.ANYWARE_DC: kernels.ARCH_ANYWARE_DC,
}


@dataclass(frozen=True)
class HourlyRecord:
    """One hour's energy ledger by source and use."""

    hour: int
    mains_up: bool
    energy_from_mains_wh: float
    energy_from_ups_battery_wh: float
    energy_from_laptop_batteries_wh: float
    energy_from_generator_wh: float
    generator_ran: bool
    idle_laptops: int
    energy_to_devices_wh: float
    ups_overhead_wh: float
    ups_recharge_wh: float
    laptop_recharge_wh: float


def conservation_residual(record: HourlyRecord) -> float:
    """Sources minus uses for one hour; zero when the ledger balances."""
    sources = (
        record.energy_from_mains_wh
        + record.energy_from_generator_wh
        + record.energy_from_ups_battery_wh
        + record.energy_from_laptop_batteries_wh
    )
    uses = (
        record.energy_to_devices_wh
        + record.ups_overhead_wh
        + record.ups_recharge_wh
        + record.laptop_recharge_wh
    )
    return sources - uses


@dataclass(frozen=True)
class ArchState:
    """Everything an architecture controller carries between hours.

    ups_overhead_w is the mode-resolved overhead on this architecture's
    attached load (constant per architecture since the attachment never
    changes); ups_spec keeps the equivalent proportional coefficient.
    """

    fleet: FleetSpec
    ups_spec: Optional[UpsSpec]
    ups_battery: Optional[BatteryState]
    laptop_batteries: tuple[BatteryState, ...]
    generator: GeneratorSpec
    generator_hours: float
    fuel: float
    laptop_depletion_policy: LaptopDepletionPolicy
    ups_overhead_w: float = 0.0
    hour: int = 0


@dataclass(frozen=True)
class ArchParams:
    """Flattened per-architecture inputs for the batch kernels and oracle."""

    kind: ArchKind
    fleet_w: float
    att_w: float
    oh_w: float
    lap_draw_w: tuple[float, ...]
    lap_cap_wh: tuple[float, ...]
    lap_rate_w: tuple[float, ...]
    ups_cap_wh: float
    ups_rate_w: float
    lap_triggers_gen: bool

    def kernel_kwargs(self) -> dict:
        return dict(
            fleet_w=self.fleet_w,
            att_w=self.att_w,
            oh_w=self.oh_w,
            lap_draw=np.array(self.lap_draw_w),
            lap_cap=np.array(self.lap_cap_wh),
            lap_rate=np.array(self.lap_rate_w),
            ups_cap=self.ups_cap_wh,
            ups_rate=self.ups_rate_w,
            lap_triggers_gen=self.lap_triggers_gen,
        )


def build_fleet(kind: ArchKind, config: "ScenarioConfig") -> FleetSpec:
    if kind == ArchKind.DESKTOP:
        return desktop_fleet(
            config.users, config.desktop_draw_w, config.switch_draw_w, config.switch_count
        )
    return anyware_fleet(
        config.users,
        config.laptop_draw_w,
        config.server_draw_w,
        config.switch_draw_w,
        config.switch_count,
    )


def anyware_device_load_w(config: "ScenarioConfig") -> float:
    """Full device load of the configured Anyware fleet; anchors UPS sizing,
    UPS charge rate, and the proportional-overhead calibration."""
    return fleet_load(build_fleet(ArchKind.ANYWARE, config))


def resolved_overhead_w(config: "ScenarioConfig", attached_w: float) -> float:
    """UPS overhead watts on an attached load, honoring the overhead mode."""
    if config.ups_overhead_mode == "fixed":
        return config.ups_overhead_w
    anchor = anyware_device_load_w(config)
    if anchor == 0:
        return 0.0
    return config.ups_overhead_w * attached_w / anchor


def laptop_backup_hours(config: "ScenarioConfig") -> tuple[float, ...]:
    if config.laptop_backup_overrides is not None:
        return tuple(config.laptop_backup_overrides)
    return (config.laptop_backup_hours,) * config.users


def derived_params(kind: ArchKind, config: "ScenarioConfig") -> ArchParams:
    """Resolve a config into the flat numbers one architecture runs on."""
    fleet = build_fleet(kind, config)
    fleet_w = fleet_load(fleet)
    att_w = 0.0
    oh_w = 0.0
    ups_cap = 0.0
    ups_rate = 0.0
    lap_draw: tuple[float, ...] = ()
    lap_cap: tuple[float, ...] = ()
    lap_rate: tuple[float, ...] = ()

    if kind in (ArchKind.ANYWARE_UPS, ArchKind.ANYWARE_DC):
        if kind == ArchKind.ANYWARE_UPS:
            att_w = fleet_w
        else:
            att_w = fleet_load(fleet, {DeviceClass.SERVER, DeviceClass.SWITCH})
        oh_w = resolved_overhead_w(config, att_w)
        # UPS hardware is sized for the full fleet in both architectures
        rated_w = anyware_device_load_w(config)
        ups_cap = config.ups_backup_hours * rated_w
        ups_rate = config.ups_charge_w if config.ups_charge_w is not None else rated_w
        if config.instant_recharge:
            ups_rate = math.inf

    if kind == ArchKind.ANYWARE_DC:
        draw = config.laptop_draw_w
        rate = config.laptop_charge_w if config.laptop_charge_w is not None else draw
        if config.instant_recharge:
            rate = math.inf
        hours = laptop_backup_hours(config)
        lap_draw = (draw,) * config.users
        lap_cap = tuple(b * draw for b in hours)
        lap_rate = (rate,) * config.users

    return ArchParams(
        kind=kind,
        fleet_w=fleet_w,
        att_w=att_w,
        oh_w=oh_w,
        lap_draw_w=lap_draw,
        lap_cap_wh=lap_cap,
        lap_rate_w=lap_rate,
        ups_cap_wh=ups_cap,
        ups_rate_w=ups_rate,
        lap_triggers_gen=config.laptop_depletion_policy == LaptopDepletionPolicy.START_GENERATOR,
    )


def initial_state(kind: ArchKind, config: "ScenarioConfig") -> ArchState:
    """Fresh ArchState with all batteries full."""
    params = derived_params(kind, config)
    fleet = build_fleet(kind, config)
    ups_spec = None
    ups_battery = None
    if kind in (ArchKind.ANYWARE_UPS, ArchKind.ANYWARE_DC):
        coefficient = params.oh_w / params.att_w if params.att_w > 0 else 0.0
        battery = BatterySpec(
            capacity_wh=params.ups_cap_wh,
            charge_power_w=params.ups_rate_w,
            backup_hours=config.ups_backup_hours,
        )
        ups_spec = UpsSpec(overhead_coefficient=coefficient, battery=battery)
        ups_battery = BatteryState.full(battery)
    laptops = tuple(
        BatteryState.full(
            BatterySpec(capacity_wh=cap, charge_power_w=rate, backup_hours=hours)
        )
        for cap, rate, hours in zip(
            params.lap_cap_wh, params.lap_rate_w, laptop_backup_hours(config)
        )
    )
    return ArchState(
        fleet=fleet,
        ups_spec=ups_spec,
        ups_battery=ups_battery,
        laptop_batteries=laptops,
        generator=GeneratorSpec(config.generator_overhead_factor, config.generator_fuel_rate),
        generator_hours=0.0,
        fuel=0.0,
        laptop_depletion_policy=config.laptop_depletion_policy,
        ups_overhead_w=params.oh_w,
        hour=0,
    )


def step(kind: ArchKind, state: ArchState, mains_up: bool) -> tuple[HourlyRecord, ArchState]:
    """Advance one hour; returns the hour's ledger and the successor state.

    Pure: the input state is unchanged. This mirrors the batch kernels
    operation for operation and serves as their readable reference.
    """
    e_mains = e_gen = e_ups = e_lap = e_dev = e_oh = e_rech_ups = e_rech_lap = 0.0
    gen_ran = False
    idle = 0
    ups_battery = state.ups_battery
    laptops = state.laptop_batteries
    fleet_w = fleet_load(state.fleet)

    if kind in (ArchKind.DESKTOP, ArchKind.ANYWARE):
        e_dev = fleet_w
        if mains_up:
            e_mains = fleet_w
        else:
            e_gen = fleet_w
            gen_ran = True

    elif kind == ArchKind.ANYWARE_UPS:
        oh_w = state.ups_overhead_w
        need = fleet_w + oh_w
        if mains_up:
            e_rech_ups, ups_battery = battery_recharge(ups_battery, 1.0)
            e_dev = fleet_w
            e_oh = oh_w
            e_mains = need + e_rech_ups
        else:
            served, ups_battery, covered = battery_serve(ups_battery, need, 1.0)
            if covered:
                e_ups = served
                e_dev = fleet_w
                e_oh = oh_w
            else:
                e_gen = fleet_w
                e_dev = fleet_w
                gen_ran = True

    else:
        att_w = fleet_load(state.fleet, {DeviceClass.SERVER, DeviceClass.SWITCH})
        oh_w = state.ups_overhead_w
        need_ups = att_w + oh_w
        if mains_up:
            e_rech_ups, ups_battery = battery_recharge(ups_battery, 1.0)
            new_laptops = []
            for battery in laptops:
                drawn, battery = battery_recharge(battery, 1.0)
                e_rech_lap += drawn
                new_laptops.append(battery)
            laptops = tuple(new_laptops)
            e_dev = fleet_w
            e_oh = oh_w
            e_mains = fleet_w + oh_w + e_rech_ups + e_rech_lap
        else:
            draw_w = next(
                s.unit_draw_w for s in state.fleet.classes if s.device_class == DeviceClass.LAPTOP
            )
            ups_ok = ups_battery.charge_wh >= need_ups
            laps_ok = all(b.charge_wh >= draw_w * 1.0 for b in laptops)
            start_gen = state.laptop_depletion_policy == LaptopDepletionPolicy.START_GENERATOR
            if not ups_ok or (start_gen and not laps_ok):
                e_gen = fleet_w
                e_dev = fleet_w
                gen_ran = True
            else:
                served, ups_battery, _ = battery_serve(ups_battery, need_ups, 1.0)
                e_ups = served
                e_oh = oh_w
                e_dev = att_w
                new_laptops = []
                for battery in laptops:
                    served, battery, covered = battery_serve(battery, draw_w, 1.0)
                    if covered:
                        e_lap += served
                        e_dev += served
                    else:
                        idle += 1
                    new_laptops.append(battery)
                laptops = tuple(new_laptops)

    record = HourlyRecord(
        hour=state.hour,
        mains_up=mains_up,
        energy_from_mains_wh=e_mains,
        energy_from_ups_battery_wh=e_ups,
        energy_from_laptop_batteries_wh=e_lap,
        energy_from_generator_wh=e_gen,
        generator_ran=gen_ran,
        idle_laptops=idle,
        energy_to_devices_wh=e_dev,
        ups_overhead_wh=e_oh,
        ups_recharge_wh=e_rech_ups,
        laptop_recharge_wh=e_rech_lap,
    )
    hours = state.generator_hours + (1.0 if gen_ran else 0.0)
    new_state = replace(
        state,
        ups_battery=ups_battery,
        laptop_batteries=laptops,
        generator_hours=hours,
        fuel=hours * state.generator.fuel_rate,
        hour=state.hour + 1,
    )
    return record, new_state


def records_from_hourly(hourly_row: np.ndarray) -> list[HourlyRecord]:
    """Decode one replication's kernel ledger into HourlyRecord values."""
    out = []
    for h in range(hourly_row.shape[0]):
        row = hourly_row[h]
        out.append(
            HourlyRecord(
                hour=h,
                mains_up=bool(row[kernels.HR_MAINS_UP]),
                energy_from_mains_wh=float(row[kernels.HR_E_MAINS]),
                energy_from_ups_battery_wh=float(row[kernels.HR_E_UPS_BATT]),
                energy_from_laptop_batteries_wh=float(row[kernels.HR_E_LAP_BATT]),
                energy_from_generator_wh=float(row[kernels.HR_E_GEN]),
                generator_ran=bool(row[kernels.HR_GEN_RAN]),
                idle_laptops=int(row[kernels.HR_IDLE]),
                energy_to_devices_wh=float(row[kernels.HR_E_DEVICES]),
                ups_overhead_wh=float(row[kernels.HR_E_OVERHEAD]),
                ups_recharge_wh=float(row[kernels.HR_E_RECHARGE_UPS]),
                laptop_recharge_wh=float(row[kernels.HR_E_RECHARGE_LAP]),
            )
        )
    return out


def run_replication(
    kind: ArchKind, config: "ScenarioConfig", seed: int
) -> tuple[list[HourlyRecord], "SummaryStats"]:
    """Simulate one replication; returns its hourly ledger and stats.

    Deterministic given (config, seed): the replication's availability comes
    from numpy's PCG64 seeded with exactly this seed.
    """
    from .config import build_policy
    from .metrics import summarize_totals

    policy = build_policy(config)
    rng = np.random.default_rng(seed)
    bits = availability_bits(policy, config.horizon_hours, rng)
    params = derived_params(kind, config)
    totals, hourly = kernels.simulate_batch(
        ARCH_IDS[kind], bits[None, :], record=True, **params.kernel_kwargs()
    )
    return records_from_hourly(hourly[0]), summarize_totals(kind, totals, config)
