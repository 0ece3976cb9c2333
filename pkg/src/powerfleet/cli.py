"""Command-line interface and file emission.

Subcommands:

    run    --config PATH [--seed N] [--reps N] [--out DIR]
           Monte Carlo of the configured architecture plus Desktop and
           Anyware baselines (paired seeds). Writes hourly.csv (the ledger of
           the replication seeded with base_seed) and summary.csv.
    sweep  --config PATH --param NAME --values LIST [--archs LIST] [--out DIR]
           Parameter sweep; writes sweep.csv plus gnuplot-ready .dat files:
           fig2_efficiency.dat and fig3_generator_hours.dat for outage_p
           sweeps, fig4_battery_sensitivity.dat for battery-hours sweeps.
    oracle --arch NAME --p F [--b-ups F] [--b-laptop F] [--policy NAME] [--g F]
           Prints the closed-form expected generator fraction and weighted
           energy per hour.

Exit codes: 0 success, 1 configuration error (bad flags, bad config file,
domain violations), 2 runtime error (trace data problems, I/O failures).
All diagnostics go to stderr. CSV/.dat numbers use 6 significant digits and
are byte-stable for a fixed (config, seed, backend) on one platform.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .analytic import expected_generator_fraction, expected_weighted_energy_per_hour
from .archsim import ArchKind, HourlyRecord, LaptopDepletionPolicy, run_replication
from .config import ConfigError, ScenarioConfig, config_items, load_config
from .metrics import SWEEP_PARAMS, SummaryStats, SweepRow, SweepSpec, efficiency, run_monte_carlo, run_sweep


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _fmt_config_value(value: object) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt_config_value(v) for v in value) + "]"
    return str(value)


def _provenance_lines(config: ScenarioConfig) -> list[str]:
    return [f"# {key} = {_fmt_config_value(value)}" for key, value in config_items(config)]


_HOURLY_COLUMNS = (
    "hour,mains_up,energy_from_mains_wh,energy_from_ups_battery_wh,"
    "energy_from_laptop_batteries_wh,energy_from_generator_wh,generator_ran,"
    "idle_laptops,energy_to_devices_wh,ups_overhead_wh,ups_recharge_wh,"
    "laptop_recharge_wh"
)

_STAT_COLUMNS = (
    "mains_wh,ups_battery_wh,laptop_battery_wh,generator_wh,"
    "electrical_input_wh,weighted_wh,generator_hours,fuel_units,idle_laptop_hours"
)


def _stat_cells(stats: SummaryStats) -> list[str]:
    cells = []
    for name in _STAT_COLUMNS.split(","):
        metric = getattr(stats, name)
        cells.append(_fmt(metric.mean))
        cells.append(_fmt(metric.ci95_half_width))
    return cells


def _stat_header() -> str:
    return ",".join(f"{n}_mean,{n}_ci95" for n in _STAT_COLUMNS.split(","))


def write_hourly_csv(path: Path, records: Sequence[HourlyRecord]) -> None:
    lines = [_HOURLY_COLUMNS]
    for r in records:
        lines.append(
            ",".join(
                (
                    str(r.hour),
                    "1" if r.mains_up else "0",
                    _fmt(r.energy_from_mains_wh),
                    _fmt(r.energy_from_ups_battery_wh),
                    _fmt(r.energy_from_laptop_batteries_wh),
                    _fmt(r.energy_from_generator_wh),
                    "1" if r.generator_ran else "0",
                    str(r.idle_laptops),
                    _fmt(r.energy_to_devices_wh),
                    _fmt(r.ups_overhead_wh),
                    _fmt(r.ups_recharge_wh),
                    _fmt(r.laptop_recharge_wh),
                )
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_summary_csv(
    path: Path,
    config: ScenarioConfig,
    rows: Sequence[tuple[SummaryStats, float, float]],
) -> None:
    lines = _provenance_lines(config)
    lines.append(
        "architecture,replications,horizon_hours,"
        + _stat_header()
        + ",efficiency_vs_desktop,efficiency_vs_anyware"
    )
    for stats, eff_desktop, eff_anyware in rows:
        cells = [stats.kind.value, str(stats.replications), str(stats.horizon_hours)]
        cells += _stat_cells(stats)
        cells += [_fmt(eff_desktop), _fmt(eff_anyware)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_sweep_csv(path: Path, config: ScenarioConfig, rows: Sequence[SweepRow]) -> None:
    lines = _provenance_lines(config)
    lines.append(
        "param,value,architecture,"
        + _stat_header()
        + ",efficiency_vs_desktop,efficiency_vs_anyware"
    )
    for row in rows:
        cells = [row.param, _fmt(row.value), row.kind.value]
        cells += _stat_cells(row.stats)
        cells += [_fmt(row.efficiency_vs_desktop), _fmt(row.efficiency_vs_anyware)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _rows_by_value(rows: Sequence[SweepRow]) -> list[tuple[float, list[SweepRow]]]:
    grouped: dict[float, list[SweepRow]] = {}
    order: list[float] = []
    for row in rows:
        if row.value not in grouped:
            grouped[row.value] = []
            order.append(row.value)
        grouped[row.value].append(row)
    return [(value, grouped[value]) for value in order]


def write_efficiency_dat(path: Path, rows: Sequence[SweepRow], axis_name: str) -> None:
    """Efficiency curves, two columns (vs desktop, vs anyware) per architecture."""
    grouped = _rows_by_value(rows)
    archs = [row.kind.value for row in grouped[0][1]]
    header = f"# {axis_name}"
    for arch in archs:
        header += f" {arch}:eff_vs_desktop {arch}:eff_vs_anyware"
    lines = [header]
    for value, value_rows in grouped:
        cells = [_fmt(value)]
        for row in value_rows:
            cells.append(_fmt(row.efficiency_vs_desktop))
            cells.append(_fmt(row.efficiency_vs_anyware))
        lines.append(" ".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_generator_hours_dat(path: Path, rows: Sequence[SweepRow], axis_name: str) -> None:
    grouped = _rows_by_value(rows)
    archs = [row.kind.value for row in grouped[0][1]]
    header = f"# {axis_name}"
    for arch in archs:
        header += f" {arch}:generator_hours_mean"
    lines = [header]
    for value, value_rows in grouped:
        cells = [_fmt(value)]
        for row in value_rows:
            cells.append(_fmt(row.stats.generator_hours.mean))
        lines.append(" ".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract wants 1
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powerfleet", description="Office-fleet energy simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one scenario")
    run.add_argument("--config", help="TOML scenario file (defaults when omitted)")
    run.add_argument("--seed", type=int, help="override simulation.base_seed")
    run.add_argument("--reps", type=int, help="override simulation.replications")
    run.add_argument("--out", default=".", help="output directory")

    sweep = sub.add_parser("sweep", help="sweep one parameter")
    sweep.add_argument("--config", help="TOML scenario file (defaults when omitted)")
    sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument(
        "--archs",
        default=",".join(k.value for k in ArchKind),
        help="comma-separated architecture names",
    )
    sweep.add_argument("--out", default=".", help="output directory")

    oracle = sub.add_parser("oracle", help="print closed-form expected values")
    oracle.add_argument("--arch", required=True, choices=[k.value for k in ArchKind])
    oracle.add_argument("--p", type=float, required=True, help="outage probability")
    oracle.add_argument("--b-ups", type=float, default=3.0, help="UPS backup hours")
    oracle.add_argument("--b-laptop", type=float, default=3.0, help="laptop backup hours")
    oracle.add_argument(
        "--policy",
        choices=[k.value for k in LaptopDepletionPolicy],
        default=LaptopDepletionPolicy.START_GENERATOR.value,
    )
    oracle.add_argument("--g", type=float, help="override generator overhead factor")
    return parser


def _load(args) -> ScenarioConfig:
    return load_config(args.config) if args.config else ScenarioConfig()


def _cmd_run(args) -> int:
    config = _load(args)
    if args.seed is not None:
        config = replace(config, base_seed=args.seed)
    if args.reps is not None:
        config = replace(config, replications=args.reps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    records, _ = run_replication(config.architecture, config, config.base_seed)
    stats = {config.architecture: run_monte_carlo(config)}
    for kind in (ArchKind.DESKTOP, ArchKind.ANYWARE):
        if kind not in stats:
            stats[kind] = run_monte_carlo(config, kind)
    ordered = [config.architecture] + [
        k for k in (ArchKind.DESKTOP, ArchKind.ANYWARE) if k != config.architecture
    ]
    rows = [
        (
            stats[k],
            efficiency(stats[k], stats[ArchKind.DESKTOP]),
            efficiency(stats[k], stats[ArchKind.ANYWARE]),
        )
        for k in ordered
    ]
    write_hourly_csv(out / "hourly.csv", records)
    write_summary_csv(out / "summary.csv", config, rows)
    print(f"wrote {out / 'hourly.csv'} and {out / 'summary.csv'}", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    try:
        values = tuple(float(tok) for tok in args.values.split(",") if tok)
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {args.values!r}")
    try:
        archs = tuple(ArchKind(tok) for tok in args.archs.split(",") if tok)
    except ValueError:
        raise ConfigError(f"--archs must name architectures, got {args.archs!r}")
    spec = SweepSpec(param=args.param, values=values, archs=archs, config=config)
    rows = run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out / "sweep.csv", config, rows)
    written = [out / "sweep.csv"]
    if args.param == "outage_p":
        write_efficiency_dat(out / "fig2_efficiency.dat", rows, "outage_p")
        write_generator_hours_dat(out / "fig3_generator_hours.dat", rows, "outage_p")
        written += [out / "fig2_efficiency.dat", out / "fig3_generator_hours.dat"]
    else:
        write_efficiency_dat(out / "fig4_battery_sensitivity.dat", rows, args.param)
        written.append(out / "fig4_battery_sensitivity.dat")
    print("wrote " + ", ".join(str(p) for p in written), file=sys.stderr)
    return 0


def _cmd_oracle(args) -> int:
    kind = ArchKind(args.arch)
    policy = LaptopDepletionPolicy(args.policy)
    config = ScenarioConfig(instant_recharge=True)
    if args.g is not None:
        config = replace(config, generator_overhead_factor=args.g)
    fraction = expected_generator_fraction(
        kind, args.p, args.b_ups, args.b_laptop, policy, config
    )
    weighted = expected_weighted_energy_per_hour(
        kind, args.p, args.b_ups, args.b_laptop, policy, config
    )
    print(f"generator_fraction = {_fmt(fraction)}")
    print(f"weighted_wh_per_hour = {_fmt(weighted)}")
    return 0


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "oracle": _cmd_oracle}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        # ConfigError and oracle-assumption violations: the request was bad
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
