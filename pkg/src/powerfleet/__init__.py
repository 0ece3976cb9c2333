"""Discrete-hour energy simulator for office computing fleets on flaky mains.

Compares four ways of powering the same office: desktops on a generator,
laptops plus a server cluster on a generator, the same fleet behind a UPS,
and a UPS that carries only the servers while laptops ride out outages on
their own batteries. Monte Carlo sweeps report weighted energy, generator
hours, and efficiency against both baselines.
"""

from .analytic import (
    OracleAssumptionError,
    OracleAssumptions,
    effective_ups_backup_hours,
    expected_generator_fraction,
    expected_weighted_energy_per_hour,
)
from .archsim import (
    ArchKind,
    ArchParams,
    ArchState,
    HourlyRecord,
    LaptopDepletionPolicy,
    conservation_residual,
    derived_params,
    initial_state,
    run_replication,
    step,
)
from .config import ConfigError, ScenarioConfig, build_policy, load_config
from .fleet import (
    BatterySpec,
    BatteryState,
    DeviceClass,
    DeviceClassSpec,
    FleetSpec,
    GeneratorSpec,
    UpsSpec,
    anyware_fleet,
    battery_recharge,
    battery_serve,
    desktop_fleet,
    fleet_load,
    ups_overhead,
)
from .kernels import active_backend, available_backends, simulate_batch
from .metrics import (
    MetricsError,
    MetricSummary,
    SummaryStats,
    SweepRow,
    SweepSpec,
    efficiency,
    run_monte_carlo,
    run_sweep,
)
from .outage import (
    Bernoulli,
    OutagePolicy,
    Scheduled,
    Trace,
    TraceError,
    availability_bits,
    load_trace,
    mains_available,
)

__version__ = "0.1.0"

__all__ = [
    "ArchKind",
    "ArchParams",
    "ArchState",
    "BatterySpec",
    "BatteryState",
    "Bernoulli",
    "ConfigError",
    "DeviceClass",
    "DeviceClassSpec",
    "FleetSpec",
    "GeneratorSpec",
    "HourlyRecord",
    "LaptopDepletionPolicy",
    "MetricSummary",
    "MetricsError",
    "OracleAssumptionError",
    "OracleAssumptions",
    "OutagePolicy",
    "ScenarioConfig",
    "Scheduled",
    "SummaryStats",
    "SweepRow",
    "SweepSpec",
    "Trace",
    "TraceError",
    "UpsSpec",
    "active_backend",
    "anyware_fleet",
    "availability_bits",
    "available_backends",
    "battery_recharge",
    "battery_serve",
    "build_policy",
    "conservation_residual",
    "derived_params",
    "desktop_fleet",
    "effective_ups_backup_hours",
    "efficiency",
    "expected_generator_fraction",
    "expected_weighted_energy_per_hour",
    "fleet_load",
    "initial_state",
    "load_config",
    "load_trace",
    "mains_available",
    "run_monte_carlo",
    "run_replication",
    "run_sweep",
    "simulate_batch",
    "step",
    "ups_overhead",
]
