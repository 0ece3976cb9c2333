"""Tests for the closed-form expected-value oracle.

The cornerstone is an exhaustive cross-check: for a 12-hour window every one
of the 2^12 availability patterns is driven through the reference stepper in
instant-recharge mode, and the probability-weighted generator frequency of the
final hour must equal the stationary formula exactly. Instant recharge makes
every mains hour a full reset, so a 12-hour window is long enough for the
final hour to be stationary (all effective backups here are < 11 hours).
"""

import dataclasses
import math

import pytest

from powerfleet import (
    ArchKind,
    LaptopDepletionPolicy,
    OracleAssumptionError,
    ScenarioConfig,
    effective_ups_backup_hours,
    expected_generator_fraction,
    expected_weighted_energy_per_hour,
    initial_state,
    step,
)

SG = LaptopDepletionPolicy.START_GENERATOR
IW = LaptopDepletionPolicy.IDLE_WAIT


def final_hour_generator_probability(kind, config, p, window=12):
    """Exact P(generator runs in the window's last hour), by enumeration."""
    total = 0.0
    for mask in range(2**window):
        bits = [(mask >> i) & 1 == 1 for i in range(window)]
        prob = math.prod((1 - p) if up else p for up in bits)
        if prob == 0.0:
            continue
        state = initial_state(kind, config)
        for up in bits:
            record, state = step(kind, state, up)
        total += prob * (1.0 if record.generator_ran else 0.0)
    return total


def test_desktop_fraction_equals_p():
    assert expected_generator_fraction(ArchKind.DESKTOP, 0.3) == 0.3
    assert expected_generator_fraction(ArchKind.ANYWARE, 0.85) == 0.85


def test_dc_fraction_quarter_default_batteries():
    """3-hour laptop batteries under start-generator: f = p^4 = 0.0625 at p=1/2."""
    assert expected_generator_fraction(ArchKind.ANYWARE_DC, 0.5) == 0.0625


def test_ups_fraction_floors_to_two_hours():
    """Rated 3 hours of fleet load, but fleet + 96 W overhead drains it in 2."""
    assert expected_generator_fraction(ArchKind.ANYWARE_UPS, 0.5) == 0.125


def test_zero_backup_falls_back_to_p():
    assert expected_generator_fraction(ArchKind.ANYWARE_DC, 0.7, b_ups=3, b_laptop=0) == 0.7


def test_fraction_degenerate_p():
    for kind in ArchKind:
        assert expected_generator_fraction(kind, 0.0) == 0.0
    assert expected_generator_fraction(ArchKind.DESKTOP, 1.0) == 1.0
    assert expected_generator_fraction(ArchKind.ANYWARE_DC, 1.0) == 1.0


def test_effective_ups_backup_hours_examples():
    assert effective_ups_backup_hours(2628, 876, 96) == 2
    assert effective_ups_backup_hours(2628, 276, 96 * 276 / 876) == 8
    assert effective_ups_backup_hours(0, 876, 96) == 0
    with pytest.raises(OracleAssumptionError):
        effective_ups_backup_hours(100, 0, 0)


def test_idle_wait_fraction_ignores_laptop_batteries():
    """Under IdleWait only the UPS side can trip the generator: f = p^9 here."""
    f = expected_generator_fraction(ArchKind.ANYWARE_DC, 0.5, policy=IW)
    assert f == 0.5**9


def test_unloaded_ups_never_starts_generator():
    config = ScenarioConfig(
        laptop_draw_w=0, server_draw_w=0, switch_draw_w=0, instant_recharge=True
    )
    assert (
        expected_generator_fraction(ArchKind.ANYWARE_UPS, 1.0, config=config) == 0.0
    )


@pytest.mark.parametrize("p", [0.3, 0.5])
def test_enumeration_matches_dc_start_generator(p):
    config = ScenarioConfig(instant_recharge=True)
    exact = final_hour_generator_probability(ArchKind.ANYWARE_DC, config, p)
    oracle = expected_generator_fraction(ArchKind.ANYWARE_DC, p, config=config)
    assert exact == pytest.approx(oracle, abs=1e-12)


def test_enumeration_matches_ups(p=0.5):
    config = ScenarioConfig(instant_recharge=True)
    exact = final_hour_generator_probability(ArchKind.ANYWARE_UPS, config, p)
    oracle = expected_generator_fraction(ArchKind.ANYWARE_UPS, p, config=config)
    assert exact == pytest.approx(oracle, abs=1e-12)


def test_enumeration_matches_dc_idle_wait(p=0.5):
    config = ScenarioConfig(
        instant_recharge=True, laptop_depletion_policy=IW
    )
    exact = final_hour_generator_probability(ArchKind.ANYWARE_DC, config, p)
    oracle = expected_generator_fraction(ArchKind.ANYWARE_DC, p, policy=IW, config=config)
    assert exact == pytest.approx(oracle, abs=1e-12)


def test_weighted_desktop_endpoints():
    assert expected_weighted_energy_per_hour(ArchKind.DESKTOP, 0.0) == 4131.0
    assert expected_weighted_energy_per_hour(ArchKind.DESKTOP, 1.0) == 4131.0 * 1.5


def test_weighted_anyware_midpoint():
    """876 W x (0.5 + 1.5 x 0.5) = 1095 Wh per hour at p = 1/2."""
    assert expected_weighted_energy_per_hour(ArchKind.ANYWARE, 0.5) == 1095.0


def test_weighted_dc_no_outages_is_load_plus_overhead():
    value = expected_weighted_energy_per_hour(ArchKind.ANYWARE_DC, 0.0)
    assert value == pytest.approx(876 + 96 * 276 / 876, rel=1e-12)
    assert value == pytest.approx(906.25, abs=0.01)


def test_weighted_ups_no_outages():
    assert expected_weighted_energy_per_hour(ArchKind.ANYWARE_UPS, 0.0) == 972.0


def test_weighted_dc_midpoint_value():
    value = expected_weighted_energy_per_hour(ArchKind.ANYWARE_DC, 0.5)
    f = 0.0625
    oh = 96 * 276 / 876
    assert value == pytest.approx(876 * ((1 - f) + 1.5 * f) + oh * (1 - f), rel=1e-12)
    assert value == pytest.approx(931.73, abs=0.01)


def test_idle_wait_weighs_less_than_start_generator():
    sg = expected_weighted_energy_per_hour(ArchKind.ANYWARE_DC, 0.5, policy=SG)
    iw = expected_weighted_energy_per_hour(ArchKind.ANYWARE_DC, 0.5, policy=IW)
    assert iw < sg


def test_fraction_monotone_in_p():
    grid = [i / 20 for i in range(21)]
    for kind in ArchKind:
        values = [expected_generator_fraction(kind, p) for p in grid]
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_fraction_monotone_in_backup_hours():
    for b in range(5):
        more = expected_generator_fraction(ArchKind.ANYWARE_UPS, 0.6, b_ups=b + 1)
        less = expected_generator_fraction(ArchKind.ANYWARE_UPS, 0.6, b_ups=b)
        assert more <= less
        more = expected_generator_fraction(ArchKind.ANYWARE_DC, 0.6, b_laptop=b + 1)
        less = expected_generator_fraction(ArchKind.ANYWARE_DC, 0.6, b_laptop=b)
        assert more <= less


def test_oracle_refuses_out_of_scope_inputs():
    with pytest.raises(OracleAssumptionError):
        expected_generator_fraction(ArchKind.DESKTOP, 1.2)
    with pytest.raises(OracleAssumptionError):
        expected_generator_fraction(ArchKind.ANYWARE_DC, 0.5, b_laptop=2.5)
    with pytest.raises(OracleAssumptionError):
        expected_generator_fraction(ArchKind.ANYWARE_DC, 0.5, b_ups=-1)
    slow_charge = ScenarioConfig(instant_recharge=False)
    with pytest.raises(OracleAssumptionError):
        expected_generator_fraction(ArchKind.ANYWARE_DC, 0.5, config=slow_charge)
    scheduled = dataclasses.replace(
        ScenarioConfig(instant_recharge=True),
        outage_kind="scheduled",
        outage_windows=((1.0, 2.0),),
    )
    with pytest.raises(OracleAssumptionError):
        expected_weighted_energy_per_hour(ArchKind.DESKTOP, 0.5, config=scheduled)
