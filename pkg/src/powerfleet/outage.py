"""Per-hour mains-availability models: Bernoulli, scheduled windows, trace replay.

Policies are immutable. Randomness comes only from the caller-supplied numpy
Generator (PCG64 via numpy.random.default_rng); replication r of a run uses
seed = base_seed + r, so identical seeds give bit-identical sequences.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

import numpy as np


class TraceError(RuntimeError):
    """Raised for unreadable, malformed, or too-short trace data."""


@dataclass(frozen=True)
class Bernoulli:
    """Independent outage with probability p each hour."""

    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("p out of [0,1]")


@dataclass(frozen=True)
class Scheduled:
    """Daily outage windows: mains is down iff hour-of-day falls in a window.

    Windows are [start, end) pairs within [0, 24), non-overlapping.
    """

    windows: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for start, end in self.windows:
            if not (0 <= start < end <= 24):
                raise ValueError("scheduled windows must satisfy 0 <= start < end <= 24")
        spans = sorted(self.windows)
        for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
            if next_start < prev_end:
                raise ValueError("scheduled windows must not overlap")

    def is_outage_hour(self, hour_of_day: float) -> bool:
        return any(start <= hour_of_day < end for start, end in self.windows)


@dataclass(frozen=True)
class Trace:
    """Replay of a recorded availability log; bits[i] = mains up in hour i."""

    bits: tuple[bool, ...]


OutagePolicy = Union[Bernoulli, Scheduled, Trace]


def mains_available(policy: OutagePolicy, hour: int, rng: np.random.Generator) -> bool:
    """Is mains power up during the given hour?

    Bernoulli draws exactly one variate per call; the other policies draw
    none, so replication streams stay aligned across policies.
    """
    if hour < 0:
        raise ValueError("hour must be >= 0")
    if isinstance(policy, Bernoulli):
        return bool(rng.random() >= policy.p)
    if isinstance(policy, Scheduled):
        return not policy.is_outage_hour(hour % 24)
    if hour >= len(policy.bits):
        raise TraceError(f"trace exhausted: hour {hour} beyond {len(policy.bits)} recorded hours")
    return policy.bits[hour]


def availability_bits(policy: OutagePolicy, horizon_h: int, rng: np.random.Generator) -> np.ndarray:
    """Availability for hours 0..horizon_h-1 as a boolean array.

    For Bernoulli this consumes exactly horizon_h variates from rng, the same
    stream mains_available would consume hour by hour.
    """
    if horizon_h < 1:
        raise ValueError("horizon_h must be >= 1")
    if isinstance(policy, Bernoulli):
        return rng.random(horizon_h) >= policy.p
    if isinstance(policy, Scheduled):
        day = np.array([not policy.is_outage_hour(h) for h in range(24)], dtype=bool)
        return np.tile(day, (horizon_h + 23) // 24)[:horizon_h]
    if len(policy.bits) < horizon_h:
        raise TraceError(
            f"trace too short: horizon {horizon_h} hours, trace has {len(policy.bits)}"
        )
    return np.array(policy.bits[:horizon_h], dtype=bool)


def load_trace(path: Union[str, os.PathLike]) -> Trace:
    """Parse a trace file: one "0" or "1" per line (LF or CRLF), 1 = mains up."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.read()
    except OSError as exc:
        raise TraceError(f"cannot read trace file {path}: {exc}") from exc
    bits = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        token = line.strip()
        if token == "1":
            bits.append(True)
        elif token == "0":
            bits.append(False)
        else:
            raise TraceError(f"trace file {path}: line {lineno}: expected 0 or 1, got {token!r}")
    if not bits:
        raise TraceError(f"trace file {path}: empty")
    return Trace(bits=tuple(bits))
