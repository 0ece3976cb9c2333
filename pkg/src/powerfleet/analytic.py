"""Closed-form expected values for Bernoulli outages under instant recharge.

With independent hourly outages (probability p) and batteries that refill
completely during any mains hour, an outage hour falls to the generator iff
it is preceded by at least B consecutive outage hours, where B is the
battery's whole-hour backup. Stationary probability:

    sum_{j >= B+1} (1-p) p^j  +  (all-outage tail)  =  p^(B+1)

These formulas are exact only under the assumptions bundled in
OracleAssumptions; violating them raises OracleAssumptionError instead of
returning a wrong number. The simulator's instant_recharge config flag exists
solely to make this equivalence testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from .archsim import ArchKind, LaptopDepletionPolicy, derived_params

if TYPE_CHECKING:  # pragma: no cover
    from .config import ScenarioConfig


class OracleAssumptionError(ValueError):
    """An oracle was asked for a case its formulas do not cover."""


@dataclass(frozen=True)
class OracleAssumptions:
    """What must hold for the closed forms to be exact."""

    instant_recharge: bool
    whole_hour_laptop_backup: bool
    bernoulli_p: float

    def validate(self) -> None:
        if not self.instant_recharge:
            raise OracleAssumptionError("oracle requires instant-recharge mode")
        if not self.whole_hour_laptop_backup:
            raise OracleAssumptionError("oracle requires whole-hour laptop backup")
        if not 0 <= self.bernoulli_p <= 1:
            raise OracleAssumptionError("oracle requires Bernoulli p in [0,1]")


def effective_ups_backup_hours(
    ups_capacity_wh: float, attached_load_w: float, overhead_w: float
) -> int:
    """Whole hours the UPS battery can carry its attached load plus overhead."""
    need_w = attached_load_w + overhead_w
    if need_w <= 0:
        raise OracleAssumptionError("attached load + overhead must be > 0")
    return math.floor(ups_capacity_wh / need_w)


def _check(
    p: float, b_ups: float, b_laptop: float, config: Optional["ScenarioConfig"]
) -> "ScenarioConfig":
    from .config import ScenarioConfig

    OracleAssumptions(
        instant_recharge=config.instant_recharge if config is not None else True,
        whole_hour_laptop_backup=float(b_laptop).is_integer(),
        bernoulli_p=p,
    ).validate()
    if b_ups < 0 or b_laptop < 0:
        raise OracleAssumptionError("backup hours must be >= 0")
    if config is not None and config.outage_kind != "bernoulli":
        raise OracleAssumptionError("oracle covers the Bernoulli outage policy only")
    # materialized defaults must satisfy the assumptions they stand in for
    return config if config is not None else ScenarioConfig(instant_recharge=True)


def _effective_backups(
    kind: ArchKind, b_ups: float, b_laptop: float, config: "ScenarioConfig"
) -> tuple[float, float]:
    """(UPS-side, laptop-side) effective whole-hour backups; inf = never limits."""
    from .archsim import anyware_device_load_w

    params = derived_params(kind, config)
    need_w = params.att_w + params.oh_w
    # capacity is rated at the full fleet load regardless of attachment
    cap_wh = b_ups * anyware_device_load_w(config)
    ups_side = math.inf if need_w <= 0 else math.floor(cap_wh / need_w)
    lap_side = b_laptop if config.laptop_draw_w > 0 else math.inf
    return ups_side, lap_side


def _power(p: float, backup: float) -> float:
    # p^(B+1) with the infinite-backup limit pinned to 0 (battery never fails)
    if math.isinf(backup):
        return 0.0
    return p ** (backup + 1)


def expected_generator_fraction(
    kind: ArchKind,
    p: float,
    b_ups: float = 3.0,
    b_laptop: float = 3.0,
    policy: LaptopDepletionPolicy = LaptopDepletionPolicy.START_GENERATOR,
    config: Optional["ScenarioConfig"] = None,
) -> float:
    """Expected fraction of hours the generator runs.

    b_ups/b_laptop are the rated backup hours; fleet loads and the overhead
    mode come from config (defaults when omitted). Laptop backup must be whole
    hours; the UPS side is floored to whole hours of attached load + overhead.
    """
    config = _check(p, b_ups, b_laptop, config)
    if kind in (ArchKind.DESKTOP, ArchKind.ANYWARE):
        return p
    ups_side, lap_side = _effective_backups(kind, b_ups, b_laptop, config)
    if kind == ArchKind.ANYWARE_UPS:
        return _power(p, ups_side)
    if policy == LaptopDepletionPolicy.START_GENERATOR:
        return _power(p, min(ups_side, lap_side))
    return _power(p, ups_side)


def expected_weighted_energy_per_hour(
    kind: ArchKind,
    p: float,
    b_ups: float = 3.0,
    b_laptop: float = 3.0,
    policy: LaptopDepletionPolicy = LaptopDepletionPolicy.START_GENERATOR,
    config: Optional["ScenarioConfig"] = None,
) -> float:
    """Expected weighted energy (mains + g x generator) per hour, stationary.

    Derived from the conservation identity: every battery watt-hour
    discharged is later redrawn from mains, so mains-per-hour equals the
    non-generator fraction times (load + overhead), and

        weighted/h = L x [(1-f) + g*f] + overhead x (1-f)

    with f the generator fraction. Under IdleWait, laptops idle on hours the
    UPS covers but their battery cannot; those hours consume (and later
    recharge) nothing, subtracting L_laptops x (p^(m+1) - f), m the laptop-
    effective backup min(B_laptop, B_ups_effective).
    """
    config = _check(p, b_ups, b_laptop, config)
    params = derived_params(kind, config)
    g = config.generator_overhead_factor
    load_w = params.fleet_w
    if kind in (ArchKind.DESKTOP, ArchKind.ANYWARE):
        return load_w * ((1 - p) + g * p)
    fraction = expected_generator_fraction(kind, p, b_ups, b_laptop, policy, config)
    base = load_w * ((1 - fraction) + g * fraction) + params.oh_w * (1 - fraction)
    if kind == ArchKind.ANYWARE_DC and policy == LaptopDepletionPolicy.IDLE_WAIT:
        ups_side, lap_side = _effective_backups(kind, b_ups, b_laptop, config)
        laptops_w = sum(params.lap_draw_w)
        idle_frac = _power(p, min(ups_side, lap_side)) - fraction
        base -= laptops_w * idle_frac
    return base
