"""
Node solver, read disturbance, SET write error and energy integration.

Run: pytest tests/test_circuit.py -v
"""

import numpy as np
import pytest

from mtj.circuit import (DAMPING, TOLERANCE, EnergyBreakdown, energy_false, energy_read, energy_set,
                         gate_rdr, set_wer, solve_read, solve_single)
from mtj.device import resistance
from mtj.params import DeviceInstance, DeviceParams, OperatingPoint

REL_TOL = 1e-2

PARAMS = DeviceParams()
OP = OperatingPoint()
NOMINAL = DeviceInstance.nominal(PARAMS)
PAIR = (NOMINAL, NOMINAL)

GRID = [(R_G, V_READ) for R_G in (5e3, 10e3, 20e3, 30e3) for V_READ in (0.2, 0.35, 0.6, 1.0)]


@pytest.mark.parametrize("combo,expected", [((0, 0), 0.1345), ((0, 1), 0.1758), ((1, 1), 0.2050)])
def test_nominal_gate_voltages(combo, expected):
    assert solve_read(PARAMS, combo, OP, PAIR).V_G == pytest.approx(expected, rel=REL_TOL)


def test_nominal_read_margin():
    rm = solve_read(PARAMS, (0, 1), OP, PAIR).V_G - solve_read(PARAMS, (0, 0), OP, PAIR).V_G
    assert rm == pytest.approx(41e-3, rel=0.10)


def test_mixed_combinations_are_symmetric():
    v01 = solve_read(PARAMS, (0, 1), OP, PAIR).V_G
    v10 = solve_read(PARAMS, (1, 0), OP, PAIR).V_G
    assert v01 == pytest.approx(v10, rel=1e-9)


@pytest.mark.parametrize("R_G,V_READ", GRID)
def test_gate_voltage_ordering(R_G, V_READ):
    op = OP._replace(R_G=R_G, V_READ=V_READ)
    v = {combo: solve_read(PARAMS, combo, op, PAIR).V_G for combo in ((0, 0), (0, 1), (1, 1))}
    assert v[(0, 0)] < v[(0, 1)] < v[(1, 1)]


@pytest.mark.parametrize("combo", [(0, 0), (0, 1), (1, 1)])
def test_gate_voltage_rises_with_read_voltage_and_load(combo):
    for R_G in (5e3, 10e3, 20e3, 30e3):
        v = [solve_read(PARAMS, combo, OP._replace(R_G=R_G, V_READ=x), PAIR).V_G for x in (0.2, 0.35, 0.6, 1.0)]
        assert all(b > a for a, b in zip(v, v[1:]))
    for V_READ in (0.2, 0.35, 0.6, 1.0):
        v = [solve_read(PARAMS, combo, OP._replace(R_G=r, V_READ=V_READ), PAIR).V_G for r in (5e3, 10e3, 20e3, 30e3)]
        assert all(b > a for a, b in zip(v, v[1:]))


@pytest.mark.parametrize("combo", [(0, 0), (0, 1), (1, 1)])
def test_kcl_residual_at_convergence(combo):
    sol = solve_read(PARAMS, combo, OP, PAIR)
    # current into R_G, expressed as a voltage across it
    assert abs(sum(sol.I) * OP.R_G - sol.V_G) <= 2 * TOLERANCE
    assert sol.iterations >= 1
    for v_mtj, current, r in zip(sol.V_MTJ, sol.I, sol.R):
        assert current == pytest.approx(v_mtj / r, rel=1e-12)


def test_constant_tmr_reduces_to_divider():
    params = PARAMS._replace(V_H=1e9)
    r_high = resistance(params, 0, 0.0, 300.0, NOMINAL)
    expected = OP.V_READ * (2.0 / r_high) / (1.0 / OP.R_G + 2.0 / r_high)
    assert solve_read(params, (0, 0), OP, PAIR).V_G == pytest.approx(expected, abs=1e-8)


def test_batch_matches_scalar_solution():
    insts = DeviceInstance(np.linspace(0.83e-9, 0.87e-9, 7), np.linspace(6.5e-16, 7.5e-16, 7))
    batch = solve_read(PARAMS, (0, 1), OP, (insts, NOMINAL))
    for k in (0, 3, 6):
        single = solve_read(PARAMS, (0, 1), OP, (insts.take(k), NOMINAL))
        assert batch.V_G[k] == pytest.approx(single.V_G, abs=1e-8)


def test_damping_constant():
    assert 0.0 < DAMPING < 1.0


def test_single_device_needs_a_drive():
    with pytest.raises(ValueError):
        solve_single(PARAMS, 0, 0.0, OP, NOMINAL)


def test_read_disturbance_ordering():
    rdr_00 = gate_rdr(PARAMS, (0, 0), OP, PAIR)
    rdr_01 = gate_rdr(PARAMS, (0, 1), OP, PAIR)
    assert gate_rdr(PARAMS, (1, 1), OP, PAIR) == 0.0
    assert 0.0 < rdr_01 < rdr_00 < 1e-6


def test_read_disturbance_anchor():
    assert 8.9e-10 / 3 <= gate_rdr(PARAMS, (0, 0), OP, PAIR) <= 8.9e-10 * 3


def test_read_disturbance_grows_with_read_voltage():
    values = [gate_rdr(PARAMS, (0, 0), OP._replace(V_READ=v), PAIR) for v in (0.3, 0.35, 0.4, 0.5)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_set_write_error_anchor():
    wer = set_wer(PARAMS, OP, NOMINAL)
    assert 1e-7 / 3 <= wer <= 1e-7 * 3


def test_set_write_error_falls_with_drive_and_rises_with_load():
    wers = [set_wer(PARAMS, OP._replace(V_SET=v), NOMINAL) for v in (0.7, 0.75, 0.8, 0.85)]
    assert all(b < a for a, b in zip(wers, wers[1:]))
    assert set_wer(PARAMS, OP._replace(R_G=15e3), NOMINAL) > set_wer(PARAMS, OP, NOMINAL)


def test_read_energy_of_parallel_pair():
    sol = solve_read(PARAMS, (1, 1), OP, PAIR)
    assert energy_read(sol, OP) == pytest.approx(71.7e-15, rel=REL_TOL)
    assert energy_read(sol, OP) + PARAMS.E_comp == pytest.approx(113.9e-15, rel=REL_TOL)


def test_set_energy_between_pre_and_post_switch_power():
    pre = solve_single(PARAMS, 0, OP.V_SET, OP, NOMINAL)
    post = solve_single(PARAMS, 1, OP.V_SET, OP, NOMINAL)
    energy = energy_set(PARAMS, OP, NOMINAL)
    assert OP.V_SET * pre.I[0] * OP.t_SET <= energy <= OP.V_SET * post.I[0] * OP.t_SET


def test_false_energy():
    assert energy_false(PARAMS, OP, NOMINAL, state=1) > 0.0
    assert energy_false(PARAMS, OP, NOMINAL, state=0) > 0.0
    assert energy_false(PARAMS, OP._replace(t_RESET=0.0), NOMINAL, state=0) == 0.0
    assert energy_false(PARAMS, OP._replace(t_RESET=0.0), NOMINAL, state=1) == 0.0


def test_energy_breakdown_total():
    breakdown = EnergyBreakdown.build(E_read=1e-15, E_set=2e-15, E_comp=3e-15)
    assert breakdown.E_false == 0.0
    assert breakdown.total == pytest.approx(6e-15, rel=1e-12)
