"""Batched hourly simulation kernels.

Two interchangeable backends compute the same per-hour ledger for a batch of
replications:

  * "numba"  - scalar loops compiled with numba.njit (default when numba
               imports cleanly),
  * "numpy"  - pure-numpy vectorized over replications.

The default is chosen by the POWERFLEET_BACKEND environment variable
("numba" or "numpy"), read once at import. The undecorated python loop is
kept importable for reference and benchmarking.

Architecture ids and ledger column layouts are shared by both backends;
instant recharge is encoded as an infinite charge rate, so min(rate, deficit)
degenerates to the full deficit.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

ARCH_DESKTOP = 0
ARCH_ANYWARE = 1
ARCH_ANYWARE_UPS = 2
ARCH_ANYWARE_DC = 3

# totals columns, per replication
TOT_MAINS = 0
TOT_GEN = 1
TOT_UPS_BATT = 2
TOT_LAP_BATT = 3
TOT_DEVICES = 4
TOT_OVERHEAD = 5
TOT_RECHARGE_UPS = 6
TOT_RECHARGE_LAP = 7
TOT_GEN_HOURS = 8
TOT_IDLE_HOURS = 9
N_TOTALS = 10

# hourly ledger columns
HR_MAINS_UP = 0
HR_GEN_RAN = 1
HR_IDLE = 2
HR_E_MAINS = 3
HR_E_UPS_BATT = 4
HR_E_LAP_BATT = 5
HR_E_GEN = 6
HR_E_DEVICES = 7
HR_E_OVERHEAD = 8
HR_E_RECHARGE_UPS = 9
HR_E_RECHARGE_LAP = 10
N_HOURLY = 11

_ENV_VAR = "POWERFLEET_BACKEND"


def _simulate_loop(
    arch,
    avail,
    fleet_w,
    att_w,
    oh_w,
    lap_draw,
    lap_cap,
    lap_rate,
    lap_charge0,
    ups_cap,
    ups_rate,
    ups_charge0,
    lap_triggers_gen,
    record,
    totals,
    hourly,
):
    # One hour per step; batteries follow the whole-interval rule and
    # recharge from mains only (the generator never refills them).
    reps, horizon = avail.shape
    n_lap = lap_draw.shape[0]
    lap_charge = np.empty(n_lap, dtype=np.float64)
    for r in range(reps):
        ups_charge = ups_charge0
        for i in range(n_lap):
            lap_charge[i] = lap_charge0[i]
        for h in range(horizon):
            up = avail[r, h]
            e_mains = 0.0
            e_gen = 0.0
            e_ups_batt = 0.0
            e_lap_batt = 0.0
            e_devices = 0.0
            e_overhead = 0.0
            e_rech_ups = 0.0
            e_rech_lap = 0.0
            gen_ran = False
            idle = 0

            if arch == ARCH_DESKTOP or arch == ARCH_ANYWARE:
                e_devices = fleet_w
                if up:
                    e_mains = fleet_w
                else:
                    e_gen = fleet_w
                    gen_ran = True
            elif arch == ARCH_ANYWARE_UPS:
                need = fleet_w + oh_w
                if up:
                    e_rech_ups = min(ups_rate, ups_cap - ups_charge)
                    ups_charge += e_rech_ups
                    e_devices = fleet_w
                    e_overhead = oh_w
                    e_mains = need + e_rech_ups
                elif ups_charge >= need:
                    ups_charge -= need
                    e_ups_batt = need
                    e_devices = fleet_w
                    e_overhead = oh_w
                else:
                    e_gen = fleet_w
                    e_devices = fleet_w
                    gen_ran = True
            else:
                need_ups = att_w + oh_w
                if up:
                    e_rech_ups = min(ups_rate, ups_cap - ups_charge)
                    ups_charge += e_rech_ups
                    for i in range(n_lap):
                        d = min(lap_rate[i], lap_cap[i] - lap_charge[i])
                        lap_charge[i] += d
                        e_rech_lap += d
                    e_devices = fleet_w
                    e_overhead = oh_w
                    e_mains = fleet_w + oh_w + e_rech_ups + e_rech_lap
                else:
                    ups_ok = ups_charge >= need_ups
                    laps_ok = True
                    for i in range(n_lap):
                        if lap_charge[i] < lap_draw[i]:
                            laps_ok = False
                            break
                    if (not ups_ok) or (lap_triggers_gen and not laps_ok):
                        e_gen = fleet_w
                        e_devices = fleet_w
                        gen_ran = True
                    else:
                        ups_charge -= need_ups
                        e_ups_batt = need_ups
                        e_overhead = oh_w
                        e_devices = att_w
                        for i in range(n_lap):
                            if lap_charge[i] >= lap_draw[i]:
                                lap_charge[i] -= lap_draw[i]
                                e_lap_batt += lap_draw[i]
                                e_devices += lap_draw[i]
                            else:
                                idle += 1

            totals[r, TOT_MAINS] += e_mains
            totals[r, TOT_GEN] += e_gen
            totals[r, TOT_UPS_BATT] += e_ups_batt
            totals[r, TOT_LAP_BATT] += e_lap_batt
            totals[r, TOT_DEVICES] += e_devices
            totals[r, TOT_OVERHEAD] += e_overhead
            totals[r, TOT_RECHARGE_UPS] += e_rech_ups
            totals[r, TOT_RECHARGE_LAP] += e_rech_lap
            if gen_ran:
                totals[r, TOT_GEN_HOURS] += 1.0
            totals[r, TOT_IDLE_HOURS] += idle
            if record:
                hourly[r, h, HR_MAINS_UP] = 1.0 if up else 0.0
                hourly[r, h, HR_GEN_RAN] = 1.0 if gen_ran else 0.0
                hourly[r, h, HR_IDLE] = idle
                hourly[r, h, HR_E_MAINS] = e_mains
                hourly[r, h, HR_E_UPS_BATT] = e_ups_batt
                hourly[r, h, HR_E_LAP_BATT] = e_lap_batt
                hourly[r, h, HR_E_GEN] = e_gen
                hourly[r, h, HR_E_DEVICES] = e_devices
                hourly[r, h, HR_E_OVERHEAD] = e_overhead
                hourly[r, h, HR_E_RECHARGE_UPS] = e_rech_ups
                hourly[r, h, HR_E_RECHARGE_LAP] = e_rech_lap


if HAS_NUMBA:
    _simulate_loop_jit = njit(cache=True)(_simulate_loop)


def _simulate_vector(
    arch,
    avail,
    fleet_w,
    att_w,
    oh_w,
    lap_draw,
    lap_cap,
    lap_rate,
    lap_charge0,
    ups_cap,
    ups_rate,
    ups_charge0,
    lap_triggers_gen,
    record,
    totals,
    hourly,
):
    reps, horizon = avail.shape
    n_lap = lap_draw.shape[0]
    ups_charge = np.full(reps, ups_charge0, dtype=np.float64)
    lap_charge = np.tile(lap_charge0, (reps, 1))
    zeros = np.zeros(reps)

    for h in range(horizon):
        up = avail[:, h]
        down = ~up
        idle = np.zeros(reps)
        e_lap_batt = zeros
        e_rech_lap = zeros

        if arch == ARCH_DESKTOP or arch == ARCH_ANYWARE:
            e_mains = np.where(up, fleet_w, 0.0)
            e_gen = np.where(down, fleet_w, 0.0)
            e_ups_batt = zeros
            e_devices = np.full(reps, fleet_w)
            e_overhead = zeros
            e_rech_ups = zeros
            gen_ran = down
        elif arch == ARCH_ANYWARE_UPS:
            need = fleet_w + oh_w
            e_rech_ups = np.where(up, np.minimum(ups_rate, ups_cap - ups_charge), 0.0)
            covered = down & (ups_charge >= need)
            gen_ran = down & ~covered
            ups_charge = ups_charge + e_rech_ups - np.where(covered, need, 0.0)
            e_mains = np.where(up, need + e_rech_ups, 0.0)
            e_ups_batt = np.where(covered, need, 0.0)
            e_gen = np.where(gen_ran, fleet_w, 0.0)
            e_devices = np.full(reps, fleet_w)
            e_overhead = np.where(gen_ran, 0.0, oh_w)
        else:
            need_ups = att_w + oh_w
            e_rech_ups = np.where(up, np.minimum(ups_rate, ups_cap - ups_charge), 0.0)
            lap_rech = np.where(
                up[:, None], np.minimum(lap_rate[None, :], lap_cap[None, :] - lap_charge), 0.0
            )
            lap_ok = lap_charge >= lap_draw[None, :]
            ups_ok = ups_charge >= need_ups
            if lap_triggers_gen:
                gen_ran = down & (~ups_ok | ~lap_ok.all(axis=1))
            else:
                gen_ran = down & ~ups_ok
            covered = down & ~gen_ran
            serve = covered[:, None] & lap_ok
            idle = (covered[:, None] & ~lap_ok).sum(axis=1).astype(np.float64)
            served_lap = np.where(serve, lap_draw[None, :], 0.0)
            ups_charge = ups_charge + e_rech_ups - np.where(covered, need_ups, 0.0)
            lap_charge = lap_charge + lap_rech - served_lap
            e_rech_lap = lap_rech.sum(axis=1)
            e_lap_batt = served_lap.sum(axis=1)
            e_mains = np.where(up, fleet_w + oh_w + e_rech_ups + e_rech_lap, 0.0)
            e_ups_batt = np.where(covered, need_ups, 0.0)
            e_gen = np.where(gen_ran, fleet_w, 0.0)
            e_devices = np.where(up | gen_ran, fleet_w, att_w + e_lap_batt)
            e_overhead = np.where(gen_ran, 0.0, oh_w)

        totals[:, TOT_MAINS] += e_mains
        totals[:, TOT_GEN] += e_gen
        totals[:, TOT_UPS_BATT] += e_ups_batt
        totals[:, TOT_LAP_BATT] += e_lap_batt
        totals[:, TOT_DEVICES] += e_devices
        totals[:, TOT_OVERHEAD] += e_overhead
        totals[:, TOT_RECHARGE_UPS] += e_rech_ups
        totals[:, TOT_RECHARGE_LAP] += e_rech_lap
        totals[:, TOT_GEN_HOURS] += gen_ran
        totals[:, TOT_IDLE_HOURS] += idle
        if record:
            hourly[:, h, HR_MAINS_UP] = up
            hourly[:, h, HR_GEN_RAN] = gen_ran
            hourly[:, h, HR_IDLE] = idle
            hourly[:, h, HR_E_MAINS] = e_mains
            hourly[:, h, HR_E_UPS_BATT] = e_ups_batt
            hourly[:, h, HR_E_LAP_BATT] = e_lap_batt
            hourly[:, h, HR_E_GEN] = e_gen
            hourly[:, h, HR_E_DEVICES] = e_devices
            hourly[:, h, HR_E_OVERHEAD] = e_overhead
            hourly[:, h, HR_E_RECHARGE_UPS] = e_rech_ups
            hourly[:, h, HR_E_RECHARGE_LAP] = e_rech_lap


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAS_NUMBA else ("numpy",)


def _resolve_default() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice == "":
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not HAS_NUMBA:
        raise ImportError(f"{_ENV_VAR}=numba but numba is not importable")
    return choice


DEFAULT_BACKEND = _resolve_default()


def active_backend() -> str:
    """Backend used when simulate_batch is called without an override."""
    return DEFAULT_BACKEND


def simulate_batch(
    arch: int,
    avail: np.ndarray,
    *,
    fleet_w: float,
    att_w: float = 0.0,
    oh_w: float = 0.0,
    lap_draw: Optional[np.ndarray] = None,
    lap_cap: Optional[np.ndarray] = None,
    lap_rate: Optional[np.ndarray] = None,
    lap_charge0: Optional[np.ndarray] = None,
    ups_cap: float = 0.0,
    ups_rate: float = 0.0,
    ups_charge0: Optional[float] = None,
    lap_triggers_gen: bool = True,
    record: bool = False,
    backend: Optional[str] = None,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Simulate a batch of replications of one architecture.

    avail is a (replications, horizon) boolean mains-availability matrix.
    Returns (totals, hourly): totals is (replications, N_TOTALS); hourly is
    (replications, horizon, N_HOURLY) when record=True, else None. Charges
    start at lap_charge0/ups_charge0, defaulting to full.
    """
    avail = np.ascontiguousarray(avail, dtype=np.bool_)
    if avail.ndim != 2:
        raise ValueError("avail must be 2-D (replications, horizon)")
    reps, horizon = avail.shape

    def as_f8(a, fallback):
        if a is None:
            a = fallback
        return np.ascontiguousarray(a, dtype=np.float64)

    lap_draw = as_f8(lap_draw, np.empty(0))
    lap_cap = as_f8(lap_cap, np.zeros_like(lap_draw))
    lap_rate = as_f8(lap_rate, np.zeros_like(lap_draw))
    lap_charge0 = as_f8(lap_charge0, lap_cap)
    if not lap_draw.shape == lap_cap.shape == lap_rate.shape == lap_charge0.shape:
        raise ValueError("per-laptop arrays must share one shape")
    if ups_charge0 is None:
        ups_charge0 = ups_cap

    which = backend if backend is not None else DEFAULT_BACKEND
    if which not in available_backends():
        raise ValueError(f"backend {which!r} not available (have {available_backends()})")

    totals = np.zeros((reps, N_TOTALS), dtype=np.float64)
    hourly = np.zeros((reps, horizon, N_HOURLY) if record else (0, 0, N_HOURLY))
    fn = _simulate_loop_jit if which == "numba" else _simulate_vector
    fn(
        int(arch),
        avail,
        float(fleet_w),
        float(att_w),
        float(oh_w),
        lap_draw,
        lap_cap,
        lap_rate,
        lap_charge0,
        float(ups_cap),
        float(ups_rate),
        float(ups_charge0),
        bool(lap_triggers_gen),
        bool(record),
        totals,
        hourly,
    )
    return totals, (hourly if record else None)
