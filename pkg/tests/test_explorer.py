"""
Sweeps, target-WER SET voltage search, min-BER search and temperature study.

Run: pytest tests/test_explorer.py -v
"""

import math

import pytest

from engine import average_rdr
from explorer import (SweepGrid, device_characteristics, find_min_ber, inclusive_range, sweep_full,
                      sweep_read, sweep_wer, temperature_analysis, vset_for_target_wer, vset_targets,
                      wer_vs_vset)
from mtj.circuit import set_wer
from mtj.errors import ConfigError, DomainError, SearchError
from mtj.params import DeviceInstance, DeviceParams, OperatingPoint
from mtj.variation import RngSpec

N_SMALL = 200
SEED = 99
LOG_TOL = 0.02

PARAMS = DeviceParams()
OP = OperatingPoint()
SMALL_GRID = SweepGrid([5e3, 30e3], [0.3, 0.35, 0.4], [0.7, 0.8, 0.9], [300.0])


def test_inclusive_range():
    values = inclusive_range(0.2, 1.0, 0.025)
    assert len(values) == 33
    assert values[0] == 0.2
    assert values[-1] == 1.0
    assert values[1] == 0.225


def test_default_grid():
    grid = SweepGrid.from_ranges()
    assert grid.R_G == [5e3, 10e3, 15e3, 20e3, 25e3, 30e3]
    assert len(grid.V_READ) == 33
    assert len(grid.V_SET) == 81
    assert grid.T == [250.0, 275.0, 300.0, 325.0, 350.0]


@pytest.mark.parametrize("kwargs", [
    {"R_G": [1e3]},
    {"V_READ": (0.1, 0.5, 0.05)},
    {"V_SET": (0.5, 1.3, 0.0)},
    {"T": [400.0]},
])
def test_grid_bounds(kwargs):
    with pytest.raises(ConfigError):
        SweepGrid.from_ranges(**kwargs)


def test_vset_at_reference_load():
    v_set = vset_for_target_wer(PARAMS, 10e3, 300.0, 1e-7, OP)
    assert v_set == pytest.approx(0.78, rel=0.02)
    wer = set_wer(PARAMS, OP._replace(V_SET=v_set), DeviceInstance.nominal(PARAMS))
    assert abs(math.log10(wer) + 7.0) <= LOG_TOL


def test_vset_rises_with_load():
    values = [vset_for_target_wer(PARAMS, R_G, 300.0, 1e-7, OP) for R_G in (5e3, 10e3, 20e3)]
    assert values[0] < values[1] < values[2]


def test_vset_targets_table():
    rows = vset_targets(PARAMS, SweepGrid([5e3, 10e3], [0.35], [0.8], [300.0]), 1e-7, OP)
    assert [r[0] for r in rows] == [5e3, 10e3]
    assert rows[0][1] < rows[1][1]


def test_vset_target_range():
    with pytest.raises(DomainError):
        vset_for_target_wer(PARAMS, 10e3, 300.0, 0.7, OP)


def test_vset_unreachable():
    with pytest.raises(SearchError):
        vset_for_target_wer(PARAMS._replace(k_ic=5.0), 10e3, 300.0, 1e-7, OP)


def test_wer_falls_with_set_voltage():
    curve = wer_vs_vset(PARAMS, OP, [0.75, 0.8, 0.85, 0.9])
    wers = [wer for _, wer in curve]
    assert all(b < a for a, b in zip(wers, wers[1:]))


def test_wer_map_rises_with_load():
    rows = sweep_wer(PARAMS, SweepGrid([5e3, 30e3], [0.35], [0.9], [300.0]), OP)
    assert len(rows) == 2
    assert rows[0][2] < rows[1][2]


def test_sweep_read():
    points = sweep_read(PARAMS, SMALL_GRID, N_SMALL, RngSpec(SEED), OP)
    assert len(points) == 6
    by_key = {(p.R_G, p.V_READ): p for p in points}
    assert by_key[(30e3, 0.35)].RM_nom > by_key[(5e3, 0.35)].RM_nom
    assert by_key[(5e3, 0.4)].V_REF > by_key[(5e3, 0.3)].V_REF
    for p in points:
        assert p.RM_3sigma < p.RM_nom
        assert 0.0 <= p.avg_ber <= 1.0
        assert math.isnan(p.avg_error)


def test_find_min_ber_picks_grid_value():
    points = sweep_read(PARAMS, SMALL_GRID, N_SMALL, RngSpec(SEED), OP)
    v_read, ber = find_min_ber(PARAMS, 5e3, SMALL_GRID, N_SMALL, RngSpec(SEED), OP, points)
    assert v_read in SMALL_GRID.V_READ
    assert ber == min(p.avg_ber for p in points if p.R_G == 5e3)
    with pytest.raises(ConfigError):
        find_min_ber(PARAMS, 15e3, SMALL_GRID, N_SMALL, RngSpec(SEED), OP, points)


def test_sweep_full_pins_set_voltage():
    grid = SweepGrid([10e3], [0.35, 0.4], [0.8], [300.0])
    points = sweep_full(PARAMS, grid, N_SMALL, RngSpec(SEED), OP)
    assert len(points) == 2
    assert points[0].V_SET == points[1].V_SET
    for p in points:
        assert abs(math.log10(p.wer_00) + 7.0) <= LOG_TOL
        assert 0.0 < p.avg_error < 1.0
        assert p.avg_energy > 0.0


def test_temperature_analysis():
    op = OP._replace(R_G=15e3, V_READ=0.375, V_SET=0.89)
    records = temperature_analysis(PARAMS, op, [350.0, 250.0, 300.0], N_SMALL, RngSpec(SEED))
    assert [r.T for r in records] == [250.0, 300.0, 350.0]
    cold, room, hot = records
    assert room.avg_error_ptat == room.avg_error_constant
    assert room.V_REF_ptat == room.V_REF_constant
    for record in (cold, hot):
        assert record.avg_error_ptat <= record.avg_error_constant
    assert hot.avg_rdr > cold.avg_rdr
    assert cold.wer_00 > hot.wer_00
    assert hot.RM_nom < cold.RM_nom


def test_temperature_range_checked():
    with pytest.raises(ConfigError):
        temperature_analysis(PARAMS, OP, [200.0], N_SMALL, RngSpec(SEED))


def test_device_characteristics():
    rt_rows, delta_ic_rows, wer_rows = device_characteristics(PARAMS, [250.0, 300.0, 350.0], [0.3, 0.6, 0.9])
    assert [row[3] for row in rt_rows] == pytest.approx([1.66, 1.50, 1.34])
    assert rt_rows[0][1] == rt_rows[2][1]
    assert all(row[1] > 0 and row[3] > row[2] for row in delta_ic_rows)
    for T in (250.0, 300.0, 350.0):
        wers = [row[2] for row in wer_rows if row[0] == T]
        assert all(b <= a for a, b in zip(wers, wers[1:]))


def test_read_disturbance_trends_over_default_grid():
    grid = SweepGrid.from_ranges()
    rdr = {(R_G, v): average_rdr(PARAMS, OP._replace(R_G=R_G, V_READ=v)) for R_G in grid.R_G for v in grid.V_READ}
    for R_G in grid.R_G:
        values = [rdr[(R_G, v)] for v in grid.V_READ]
        assert all(b >= a for a, b in zip(values, values[1:]))
    for v in grid.V_READ:
        values = [rdr[(R_G, v)] for R_G in grid.R_G]
        assert all(b <= a for a, b in zip(values, values[1:]))


def test_read_margin_peak_and_min_ber_over_default_range():
    grid = SweepGrid.from_ranges(R_G=[5e3, 30e3])
    points = sweep_read(PARAMS, grid, N_SMALL, RngSpec(SEED), OP)
    for R_G in grid.R_G:
        margins = [p.RM_3sigma for p in points if p.R_G == R_G]
        peak = margins.index(max(margins))
        assert 0 < peak < len(margins) - 1
    _, ber_5k = find_min_ber(PARAMS, 5e3, grid, N_SMALL, RngSpec(SEED), OP, points)
    _, ber_30k = find_min_ber(PARAMS, 30e3, grid, N_SMALL, RngSpec(SEED), OP, points)
    assert ber_30k < ber_5k


def test_gate_error_has_interior_minimum_in_read_voltage():
    grid = SweepGrid([5e3], [0.2, 0.35, 1.0], [0.8], [300.0])
    low, mid, high = sweep_full(PARAMS, grid, N_SMALL, RngSpec(SEED), OP)
    assert mid.avg_error < low.avg_error
    assert mid.avg_error < high.avg_error
