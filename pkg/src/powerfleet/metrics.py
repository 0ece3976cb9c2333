"""Monte Carlo aggregation, the efficiency metric, and parameter sweeps.

Replication r draws its availability from PCG64 seeded with base_seed + r,
so paired runs of different architectures at the same sweep point see
identical outage sequences. Comparison happens on weighted energy
(mains + g x generator watt-hours): raw electrical energy is blind to
generator avoidance because every architecture ultimately powers the same
devices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from .archsim import ARCH_IDS, ArchKind, derived_params
from .config import ScenarioConfig, build_policy
from .outage import availability_bits


class MetricsError(RuntimeError):
    """A metric is undefined for the given inputs."""


@dataclass(frozen=True)
class MetricSummary:
    """Per-replication values with their mean and 95% confidence half-width."""

    values: np.ndarray
    mean: float
    ci95_half_width: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MetricSummary":
        values = np.asarray(values, dtype=np.float64)
        mean = float(values.mean())
        if values.size > 1 and not np.all(values == values[0]):
            half = float(1.96 * values.std(ddof=1) / math.sqrt(values.size))
        else:
            # a deterministic scenario has width exactly 0, not mean-rounding noise
            half = 0.0
        return cls(values=values, mean=mean, ci95_half_width=half)


@dataclass(frozen=True)
class SummaryStats:
    """Aggregated totals of one architecture over a batch of replications.

    Energies are raw electrical watt-hours by source except weighted_wh,
    which multiplies generator energy by the overhead factor g. Electrical
    input counts primary sources (mains + generator); battery discharge is
    internal throughput of previously drawn energy, reported by source but
    not new input. idle_laptop_hours counts laptop-hours spent dark under
    IdleWait.
    """

    kind: ArchKind
    horizon_hours: int
    mains_wh: MetricSummary
    ups_battery_wh: MetricSummary
    laptop_battery_wh: MetricSummary
    generator_wh: MetricSummary
    electrical_input_wh: MetricSummary
    weighted_wh: MetricSummary
    generator_hours: MetricSummary
    fuel_units: MetricSummary
    idle_laptop_hours: MetricSummary

    @property
    def replications(self) -> int:
        return self.weighted_wh.values.size


def summarize_totals(kind: ArchKind, totals: np.ndarray, config: ScenarioConfig) -> SummaryStats:
    """Fold kernel per-replication totals into a SummaryStats."""
    g = config.generator_overhead_factor
    mains = totals[:, kernels.TOT_MAINS]
    gen = totals[:, kernels.TOT_GEN]
    gen_hours = totals[:, kernels.TOT_GEN_HOURS]
    return SummaryStats(
        kind=kind,
        horizon_hours=config.horizon_hours,
        mains_wh=MetricSummary.from_values(mains),
        ups_battery_wh=MetricSummary.from_values(totals[:, kernels.TOT_UPS_BATT]),
        laptop_battery_wh=MetricSummary.from_values(totals[:, kernels.TOT_LAP_BATT]),
        generator_wh=MetricSummary.from_values(gen),
        electrical_input_wh=MetricSummary.from_values(mains + gen),
        weighted_wh=MetricSummary.from_values(mains + g * gen),
        generator_hours=MetricSummary.from_values(gen_hours),
        fuel_units=MetricSummary.from_values(gen_hours * config.generator_fuel_rate),
        idle_laptop_hours=MetricSummary.from_values(totals[:, kernels.TOT_IDLE_HOURS]),
    )


def efficiency(arch_stats: SummaryStats, baseline_stats: SummaryStats) -> float:
    """1 - arch weighted energy / baseline weighted energy; negative when worse.

    Meaningful only for paired runs (same outage policy, horizon, seeds).
    """
    denominator = baseline_stats.weighted_wh.mean
    if denominator == 0:
        raise MetricsError("baseline weighted energy is zero; efficiency undefined")
    return 1.0 - arch_stats.weighted_wh.mean / denominator


def run_monte_carlo(config: ScenarioConfig, kind: Optional[ArchKind] = None) -> SummaryStats:
    """Run config.replications independent replications of one architecture.

    kind defaults to config.architecture. Replication r is seeded with
    base_seed + r; results do not depend on execution order.
    """
    if kind is None:
        kind = config.architecture
    policy = build_policy(config)
    horizon = config.horizon_hours
    reps = config.replications
    bits = np.empty((reps, horizon), dtype=np.bool_)
    for r in range(reps):
        rng = np.random.default_rng(config.base_seed + r)
        bits[r] = availability_bits(policy, horizon, rng)
    params = derived_params(kind, config)
    totals, _ = kernels.simulate_batch(ARCH_IDS[kind], bits, **params.kernel_kwargs())
    return summarize_totals(kind, totals, config)


SWEEP_PARAMS = ("outage_p", "laptop_backup_hours", "ups_backup_hours")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter, its values, and which architectures to run."""

    param: str
    values: tuple[float, ...]
    archs: tuple[ArchKind, ...]
    config: ScenarioConfig

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"param must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if not self.values:
            raise ValueError("values must be non-empty")
        if not self.archs:
            raise ValueError("archs must be non-empty")
        for v in self.values:
            if self.param == "outage_p" and not 0 <= v <= 1:
                raise ValueError("outage_p values out of [0,1]")
            if self.param != "outage_p" and v < 0:
                raise ValueError(f"{self.param} values must be >= 0")

    def config_at(self, value: float) -> ScenarioConfig:
        if self.param == "outage_p":
            # sweeping p implies the Bernoulli policy
            return replace(self.config, outage_kind="bernoulli", outage_p=value)
        if self.param == "laptop_backup_hours":
            return replace(self.config, laptop_backup_hours=value, laptop_backup_overrides=None)
        return replace(self.config, ups_backup_hours=value)


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    kind: ArchKind
    stats: SummaryStats
    efficiency_vs_desktop: float
    efficiency_vs_anyware: float


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Paired-seed Monte Carlo for every value x architecture, in sweep order.

    Desktop and Anyware baselines are computed once per value and reused both
    as efficiency denominators and as the rows for those architectures.
    """
    rows = []
    for value in spec.values:
        config = spec.config_at(value)
        baselines = {
            ArchKind.DESKTOP: run_monte_carlo(config, ArchKind.DESKTOP),
            ArchKind.ANYWARE: run_monte_carlo(config, ArchKind.ANYWARE),
        }
        for kind in spec.archs:
            stats = baselines.get(kind) or run_monte_carlo(config, kind)
            rows.append(
                SweepRow(
                    param=spec.param,
                    value=value,
                    kind=kind,
                    stats=stats,
                    efficiency_vs_desktop=efficiency(stats, baselines[ArchKind.DESKTOP]),
                    efficiency_vs_anyware=efficiency(stats, baselines[ArchKind.ANYWARE]),
                )
            )
    return rows
