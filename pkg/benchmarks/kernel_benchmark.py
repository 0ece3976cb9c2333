"""Benchmark the simulation kernels: numba loop vs vectorized numpy.

Runs the default DC scenario (the heaviest kernel: per-laptop state) on both
backends, checks they produce identical ledgers, and prints timings. The
plain-python reference loop can be included with --with-python to show what
the jit buys; it is ~two orders of magnitude slower, so it runs on a reduced
batch and its time is scaled up.

Usage: python benchmarks/kernel_benchmark.py [--reps N] [--horizon H] [--best-of K]
"""

import argparse
import time

import numpy as np

from powerfleet import ArchKind, ScenarioConfig, available_backends, simulate_batch
from powerfleet.archsim import ARCH_IDS, derived_params
from powerfleet.kernels import N_HOURLY, N_TOTALS, _simulate_loop
from powerfleet.outage import Bernoulli, availability_bits


def build_batch(reps, horizon, seed=42):
    config = ScenarioConfig()
    params = derived_params(ArchKind.ANYWARE_DC, config)
    bits = np.empty((reps, horizon), dtype=np.bool_)
    policy = Bernoulli(config.outage_p)
    for r in range(reps):
        bits[r] = availability_bits(policy, horizon, np.random.default_rng(seed + r))
    return ARCH_IDS[ArchKind.ANYWARE_DC], bits, params.kernel_kwargs()


def time_backend(arch, bits, kwargs, backend, best_of):
    best = float("inf")
    result = None
    for _ in range(best_of):
        started = time.perf_counter()
        result, _ = simulate_batch(arch, bits, backend=backend, **kwargs)
        best = min(best, time.perf_counter() - started)
    return best, result


def time_python_loop(arch, bits, kwargs, best_of):
    """Time the undecorated loop on a slice and scale to the full batch."""
    slice_reps = max(1, bits.shape[0] // 100)
    sample = np.ascontiguousarray(bits[:slice_reps])
    scale = bits.shape[0] / slice_reps
    best = float("inf")
    totals = np.zeros((slice_reps, N_TOTALS))
    hourly = np.zeros((0, 0, N_HOURLY))
    lap_draw = np.asarray(kwargs["lap_draw"], dtype=np.float64)
    lap_cap = np.asarray(kwargs["lap_cap"], dtype=np.float64)
    lap_rate = np.asarray(kwargs["lap_rate"], dtype=np.float64)
    args = (
        kwargs["fleet_w"],
        kwargs["att_w"],
        kwargs["oh_w"],
        lap_draw,
        lap_cap,
        lap_rate,
        lap_cap.copy(),  # start fully charged, same as simulate_batch's default
        kwargs["ups_cap"],
        kwargs["ups_rate"],
        kwargs["ups_cap"],
        kwargs["lap_triggers_gen"],
        False,
    )
    for _ in range(best_of):
        totals[:] = 0
        started = time.perf_counter()
        _simulate_loop(arch, sample, *args, totals, hourly)
        best = min(best, time.perf_counter() - started)
    return best * scale, slice_reps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--horizon", type=int, default=720)
    parser.add_argument("--best-of", type=int, default=3)
    parser.add_argument("--with-python", action="store_true")
    args = parser.parse_args()

    arch, bits, kwargs = build_batch(args.reps, args.horizon)
    print(f"scenario: anyware_dc, {args.reps} replications x {args.horizon} hours")

    timings = {}
    results = {}
    backends = available_backends()
    if "numba" in backends:
        # first call pays jit compilation; warm before timing
        simulate_batch(arch, bits[:1], backend="numba", **kwargs)
    for backend in backends:
        timings[backend], results[backend] = time_backend(
            arch, bits, kwargs, backend, args.best_of
        )

    if len(backends) == 2:
        assert np.allclose(results["numba"], results["numpy"], atol=1e-9, rtol=0), (
            "backends disagree"
        )
        print("ledger check: numba and numpy totals agree (atol 1e-9)")

    for backend in backends:
        rate = args.reps * args.horizon / timings[backend] / 1e6
        print(f"{backend:>7}: {timings[backend] * 1e3:8.1f} ms   {rate:6.1f} M rep-hours/s")
    if len(backends) == 2:
        print(f"speedup: numba is {timings['numpy'] / timings['numba']:.1f}x numpy")

    if args.with_python:
        scaled, slice_reps = time_python_loop(arch, bits, kwargs, args.best_of)
        print(
            f" python: {scaled * 1e3:8.1f} ms (extrapolated from {slice_reps} replications)"
        )
        print(f"speedup: numba is {scaled / timings[backends[0]]:.0f}x the plain loop")


if __name__ == "__main__":
    main()
