'''
SIMPLY GATE ENGINE
Runs READ -> compare -> conditional SET (and FALSE) on a pair of STT-MTJs and
assembles the per-input-combination error and energy report.
'''
from collections import namedtuple

import numpy as np

from mtj.circuit import (EnergyBreakdown, energy_false, energy_read, energy_set, gate_rdr,
                         set_wer, solve_read, solve_single)
from mtj.device import switching_probability, write_error_rate
from mtj.errors import ConfigError, ModelError
from mtj.params import DeviceInstance, SwitchDirection
from mtj.variation import (COMBOS, GaussianSummary, campaign_summaries, equal_ber_vref,
                           evaluate_vref, read_campaign, read_margins, sample_instances)

# Q' of the IMPLY truth table, indexed by (P, Q)
IMPLY = {(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 1}
T_MATCH = 1e-9

COMBO_NAME = lambda combo: '{}{}'.format(*combo)
MILLI = lambda value: '{:.2f} mV'.format(value * 1e3)
FEMTO = lambda value: '{:.1f} fJ'.format(value * 1e15)

ComboReport = namedtuple('ComboReport', ['combo', 'rdr', 'ber', 'wer', 'error', 'energy', 'output_bit',
                                         'p_after', 'V_G', 'detected', 'breakdown'])
GateReport = namedtuple('GateReport', ['rows', 'avg_error', 'avg_energy', 'V_REF', 'ber_report',
                                       'summaries', 'margins'])
FalseReport = namedtuple('FalseReport', ['start_state', 'end_state', 'error', 'energy'])


class VrefPolicy(namedtuple('_VrefPolicy', ['kind', 'V_REF', 'table'])):
    '''
    Where the comparator reference comes from: extracted from the campaign at
    the equal-BER point (balanced), a fixed voltage (constant), or a
    temperature-indexed table (ptat).
    '''
    BALANCED = 'balanced'
    CONSTANT = 'constant'
    PTAT = 'ptat'

    @classmethod
    def balanced(cls):
        return cls(cls.BALANCED, None, None)

    @classmethod
    def constant(cls, V_REF):
        if not V_REF > 0:
            raise ConfigError('constant V_REF must be positive, got {}'.format(V_REF))
        return cls(cls.CONSTANT, float(V_REF), None)

    @classmethod
    def ptat(cls, table):
        if any(not v > 0 for v in table.values()):
            raise ConfigError('PTAT V_REF values must be positive')
        return cls(cls.PTAT, None, dict(table))

    def resolve(self, T):
        '''
        V_REF at temperature T, or None for the balanced policy.
        '''
        if self.kind == self.CONSTANT:
            return self.V_REF
        if self.kind == self.PTAT:
            for key, value in self.table.items():
                if abs(key - T) <= T_MATCH:
                    return value
            raise ConfigError('PTAT table has no V_REF entry for T = {} K'.format(T))
        return None


def _state_after_read(params, state, current, op, inst):
    # a stored 0 is flipped by the READ current when switching is more likely than not
    if state == 0 and switching_probability(params, current, op.t_READ, op.T,
                                            SwitchDirection.AP_TO_P, inst) >= 0.5:
        return 1
    return state


def execute_simply(params, combo, op, V_REF, ber_report, run_log=None):
    '''
    Executes one SIMPLY operation on the nominal devices.

    Args:
        params (DeviceParams): device description.
        combo (tuple): stored (P, Q) bits.
        op (OperatingPoint): bias, timing and temperature.
        V_REF (float): comparator reference voltage.
        ber_report (BerReport): worst-case comparator error rates at V_REF.
        run_log (list): optional list of log lines to append to.

    Returns:
        ComboReport: error terms, energy, and the resulting Q' and P.

    Note:
        The comparator fires the SET pulse when V_G < V_REF; otherwise both
        drivers stay in HI-Z and no SET energy is spent. Only READ drives P, so
        its final bit is the more likely outcome of the READ pulse.
    '''
    nominal = DeviceInstance.nominal(params)
    insts = (nominal, nominal)
    sol = solve_read(params, combo, op, insts)
    rdr = gate_rdr(params, combo, op, insts, sol)
    detected = sol.V_G < V_REF

    if combo == (0, 0):
        ber = ber_report.worst_ber_00
    elif combo == (1, 1):
        ber = ber_report.worst_ber_11 or 0.0
    else:
        ber = ber_report.worst_ber_neq

    # most likely bits once READ is over; P stays undriven from here on
    p_after, q_read = (_state_after_read(params, state, current, op, nominal)
                       for state, current in zip(combo, sol.I))
    if detected:
        wer = set_wer(params, op, nominal)
        e_set = energy_set(params, op, nominal)
        q_after = 1
    else:
        wer = 0.0
        e_set = 0.0
        q_after = q_read

    breakdown = EnergyBreakdown.build(E_read=energy_read(sol, op), E_set=e_set, E_comp=params.E_comp)
    error = 1.0 - (1.0 - rdr) * (1.0 - ber) * (1.0 - wer)
    if run_log is not None:
        run_log.append('{} V_G = {}, {}, error {:.3g}, energy {}'.format(
            COMBO_NAME(combo), MILLI(sol.V_G), 'SET applied' if detected else 'drivers HI-Z',
            error, FEMTO(breakdown.total)))
    return ComboReport(combo, rdr, ber, wer, error, breakdown.total, q_after, p_after, sol.V_G,
                       detected, breakdown)


def truth_table_check(params, op, run_log=None):
    '''
    Error-free IMPLY check: no variation, no V_REF offset, nominal V_G only.
    Returns True when Q' follows the truth table and P is untouched in every row.
    '''
    params = params.without_variation()
    op = op._replace(delta_ref=0.0)
    nominal = DeviceInstance.nominal(params)
    v_g = {combo: solve_read(params, combo, op, (nominal, nominal)).V_G for combo in COMBOS}
    sum00 = GaussianSummary(v_g[(0, 0)], 0.0, 2)
    sum_neq = GaussianSummary(0.5 * (v_g[(0, 1)] + v_g[(1, 0)]), 0.0, 2)
    sum11 = GaussianSummary(v_g[(1, 1)], 0.0, 2)
    report = equal_ber_vref(sum00, sum_neq, 0.0, sum11)

    ok = True
    for combo in COMBOS:
        row = execute_simply(params, combo, op, report.V_REF, report, run_log)
        if row.output_bit != IMPLY[combo] or row.p_after != combo[0]:
            ok = False
            if run_log is not None:
                run_log.append('{} violates the truth table'.format(COMBO_NAME(combo)))
    return ok


def false_op(params, device_state, op):
    '''
    FALSE on one device: a negative V_RESET pulse writes 0.
    '''
    if not op.V_RESET < 0:
        raise ConfigError('FALSE needs a negative V_RESET, got {}'.format(op.V_RESET))
    nominal = DeviceInstance.nominal(params)
    if device_state == 1:
        sol = solve_single(params, 1, op.V_RESET, op, nominal)
        error = write_error_rate(params, abs(sol.I[0]), op.t_RESET, op.T, SwitchDirection.P_TO_AP, nominal)
    else:
        error = 0.0
    return FalseReport(device_state, 0, error, energy_false(params, op, nominal, device_state))


def gate_report(params, op, policy, N, rng, run_log=None, insts=None, voltages=None):
    '''
    Runs the Monte Carlo READ campaign, resolves V_REF from the policy and
    builds the four-row report with its averages.
    '''
    if voltages is None:
        voltages = read_campaign(params, op, N, rng, insts)
    sum00, sum_neq, sum11 = campaign_summaries(voltages)
    v_ref = policy.resolve(op.T) if policy is not None else None
    if v_ref is None:
        ber = equal_ber_vref(sum00, sum_neq, op.delta_ref, sum11)
    else:
        ber = evaluate_vref(sum00, sum_neq, v_ref, op.delta_ref, sum11)
    if run_log is not None:
        run_log.append('T = {} K, R_G = {} ohm, V_READ = {} V, V_SET = {} V, V_REF = {}'.format(
            op.T, op.R_G, op.V_READ, op.V_SET, MILLI(ber.V_REF)))

    rows = tuple(execute_simply(params, combo, op, ber.V_REF, ber, run_log) for combo in COMBOS)
    avg_error = sum(row.error for row in rows) / len(rows)
    avg_energy = sum(row.energy for row in rows) / len(rows)
    return GateReport(rows, avg_error, avg_energy, ber.V_REF, ber, (sum00, sum_neq, sum11),
                      read_margins(sum00, sum_neq))


def ptat_vref_table(params, op, T_grid, N, rng, insts=None, run_log=None):
    '''
    Equal-BER V_REF at each temperature of the grid, from campaigns sharing
    one instance set. The result must rise with temperature.
    '''
    if insts is None:
        insts = (sample_instances(rng, N, 0, params), sample_instances(rng, N, 1, params))
    table = {}
    for T in sorted(T_grid):
        if not params.t_min <= T <= params.t_max:
            raise ConfigError('PTAT grid temperature {} K outside [{}, {}] K'.format(T, params.t_min, params.t_max))
        sum00, sum_neq, _ = campaign_summaries(read_campaign(params, op._replace(T=T), N, rng, insts))
        table[T] = equal_ber_vref(sum00, sum_neq, op.delta_ref).V_REF
        if run_log is not None:
            run_log.append('PTAT V_REF({} K) = {}'.format(T, MILLI(table[T])))
    temps = sorted(table)
    if any(table[b] <= table[a] for a, b in zip(temps, temps[1:])):
        raise ModelError('extracted V_REF is not increasing with temperature: {}'.format(
            ', '.join('{}: {:.4g}'.format(T, table[T]) for T in temps)))
    return table


def average_rdr(params, op):
    '''Nominal read disturbance rate averaged over the four combinations.'''
    nominal = DeviceInstance.nominal(params)
    return float(np.mean([gate_rdr(params, combo, op, (nominal, nominal)) for combo in COMBOS]))
