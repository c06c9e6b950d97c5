'''
Design-space exploration: READ and full-gate sweeps over (R_G, V_READ),
target-WER SET voltages, minimum-BER search and the temperature study.
'''
from collections import namedtuple
import math

import numpy as np
from scipy.optimize import bisect

import config
from engine import VrefPolicy, average_rdr, gate_report, ptat_vref_table
from mtj.circuit import set_wer
from mtj.device import (critical_current, interpolate_thermal, resistance, resistance_parallel,
                        thermal_stability, write_error_rate)
from mtj.errors import ConfigError, DomainError, SearchError
from mtj.params import DeviceInstance, OperatingPoint, SwitchDirection
from mtj.variation import (campaign_summaries, equal_ber_vref, read_campaign, read_margins,
                           sample_instances)

VSET_BRACKET = (0.4, 1.5)  # V
VSET_XTOL = 1e-6  # V
LOG_WER_TOL = 0.02  # decades
TARGET_WER_RANGE = (1e-12, 0.5)  # open interval
REFERENCE_T = 300.0

# grid bounds accepted by SweepGrid.validate
R_G_BOUNDS = (5e3, 30e3)
V_READ_BOUNDS = (0.2, 1.0)
V_SET_BOUNDS = (0.5, 1.3)


def inclusive_range(start, stop, step):
    # grid values rounded to the microvolt so float steps do not drift
    if not step > 0:
        raise ConfigError('sweep steps must be positive, got {}'.format(step))
    if stop < start:
        raise ConfigError('sweep range stop {} lies below start {}'.format(stop, start))
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 6) for k in range(count)]


class SweepGrid(namedtuple('_SweepGrid', ['R_G', 'V_READ', 'V_SET', 'T'])):
    '''
    Lists of load resistances, READ voltages, SET voltages and temperatures.
    '''

    @classmethod
    def from_ranges(cls, R_G=None, V_READ=None, V_SET=None, T=None):
        '''
        Builds a grid from (start, stop, step) tuples for the voltages.
        Missing arguments fall back to the config.py defaults.
        '''
        grid = cls([float(r) for r in (R_G if R_G is not None else config.SWEEP_R_G)],
                   inclusive_range(*(V_READ if V_READ is not None else config.SWEEP_V_READ)),
                   inclusive_range(*(V_SET if V_SET is not None else config.SWEEP_V_SET)),
                   [float(t) for t in (T if T is not None else config.SWEEP_T)])
        return grid.validate()

    def validate(self):
        for name, bounds in (('R_G', R_G_BOUNDS), ('V_READ', V_READ_BOUNDS), ('V_SET', V_SET_BOUNDS)):
            values = getattr(self, name)
            if not values:
                raise ConfigError('sweep {} list is empty'.format(name))
            lo, hi = bounds
            if min(values) < lo - 1e-9 or max(values) > hi + 1e-9:
                raise ConfigError('sweep {} values must lie in [{}, {}]'.format(name, lo, hi))
        if not self.T or min(self.T) < 250.0 or max(self.T) > 350.0:
            raise ConfigError('sweep temperatures must lie in [250, 350] K')
        return self


SweepPoint = namedtuple('SweepPoint', ['R_G', 'V_READ', 'V_SET', 'T', 'RM_nom', 'RM_3sigma', 'V_REF',
                                       'avg_rdr', 'avg_ber', 'wer_00', 'avg_error', 'avg_energy'])

TemperatureRecord = namedtuple('TemperatureRecord', ['T', 'avg_rdr', 'wer_00', 'RM_nom', 'RM_3sigma',
                                                     'V_REF_constant', 'V_REF_ptat', 'avg_error_constant',
                                                     'avg_error_ptat', 'avg_energy'])


def _shared_instances(rng, N, params):
    return sample_instances(rng, N, 0, params), sample_instances(rng, N, 1, params)


def _avg_ber(ber_report):
    # rows 01 and 10 both carry the P!=Q worst case
    return (ber_report.worst_ber_00 + 2.0 * ber_report.worst_ber_neq + (ber_report.worst_ber_11 or 0.0)) / 4.0


def vset_for_target_wer(params, R_G, T, target, op=None):
    '''
    Smallest V_SET in the search bracket whose SET pulse meets the target
    write error rate at load R_G and temperature T.

    Raises:
        DomainError: if the target is outside (1e-12, 0.5).
        SearchError: if the bracket does not contain the target.
    '''
    wer_lo, wer_hi = TARGET_WER_RANGE
    if not wer_lo < target < wer_hi:
        raise DomainError('target WER must lie in ({:g}, {:g}), got {}'.format(wer_lo, wer_hi, target))
    base = (op or OperatingPoint())._replace(R_G=R_G, T=T)
    nominal = DeviceInstance.nominal(params)
    log_target = math.log10(target)

    def log_gap(v_set):
        wer = set_wer(params, base._replace(V_SET=v_set), nominal)
        return math.log10(max(wer, 1e-300)) - log_target

    lo, hi = VSET_BRACKET
    if log_gap(lo) < 0 or log_gap(hi) > 0:
        raise SearchError('WER {:g} not reachable for V_SET in [{}, {}] V at R_G = {} ohm, T = {} K'
                          .format(target, lo, hi, R_G, T))
    v_set = bisect(log_gap, lo, hi, xtol=VSET_XTOL)
    if abs(log_gap(v_set)) > LOG_WER_TOL:
        raise SearchError('WER jumps across the target near V_SET = {:.4f} V'.format(v_set))
    return v_set


def vset_targets(params, grid, target=config.TARGET_WER, op=None, T=REFERENCE_T):
    '''(R_G, V_SET*) pairs over the grid loads.'''
    return [(R_G, vset_for_target_wer(params, R_G, T, target, op)) for R_G in grid.R_G]


def wer_vs_vset(params, op, V_SET_values):
    '''SET write error rate of the nominal device at each V_SET.'''
    nominal = DeviceInstance.nominal(params)
    return [(v, set_wer(params, op._replace(V_SET=v), nominal)) for v in V_SET_values]


def sweep_wer(params, grid, op=None, T=REFERENCE_T):
    '''
    SET write error rate over (R_G, V_SET) at the nominal corner.
    '''
    base = (op or OperatingPoint())._replace(T=T)
    return [(R_G, v, wer) for R_G in grid.R_G
            for v, wer in wer_vs_vset(params, base._replace(R_G=R_G), grid.V_SET)]


def sweep_read(params, grid, N, rng, op=None, run_log=None):
    '''
    READ quantities over every (R_G, V_READ) of the grid at op.T. All points
    share one Monte Carlo instance set.
    '''
    op = op or OperatingPoint()
    insts = _shared_instances(rng, N, params)
    points = []
    for R_G in grid.R_G:
        for V_READ in grid.V_READ:
            point_op = op._replace(R_G=R_G, V_READ=V_READ)
            sum00, sum_neq, sum11 = campaign_summaries(read_campaign(params, point_op, N, rng, insts))
            rm_nom, rm_3sigma = read_margins(sum00, sum_neq)
            ber = equal_ber_vref(sum00, sum_neq, op.delta_ref, sum11)
            points.append(SweepPoint(R_G, V_READ, op.V_SET, op.T, rm_nom, rm_3sigma, ber.V_REF,
                                     average_rdr(params, point_op), _avg_ber(ber),
                                     math.nan, math.nan, math.nan))
        if run_log is not None:
            run_log.append('READ sweep done for R_G = {} ohm'.format(R_G))
    return points


def find_min_ber(params, R_G, grid, N, rng, op=None, points=None):
    '''
    V_READ of the grid with the lowest average worst-case BER at load R_G.

    Returns:
        tuple: (V_READ*, BER*)
    '''
    if points is None:
        points = sweep_read(params, grid._replace(R_G=[R_G]), N, rng, op)
    candidates = [p for p in points if p.R_G == R_G]
    if not candidates:
        raise ConfigError('no sweep points at R_G = {} ohm'.format(R_G))
    best = min(candidates, key=lambda p: p.avg_ber)
    return best.V_READ, best.avg_ber


def sweep_full(params, grid, N, rng, op=None, target=config.TARGET_WER, run_log=None):
    '''
    Full gate report per (R_G, V_READ), with V_SET pinned per R_G to the
    voltage reaching the target WER.
    '''
    op = op or OperatingPoint()
    insts = _shared_instances(rng, N, params)
    points = []
    for R_G in grid.R_G:
        v_set = vset_for_target_wer(params, R_G, op.T, target, op)
        if run_log is not None:
            run_log.append('R_G = {} ohm: V_SET* = {:.4f} V'.format(R_G, v_set))
        for V_READ in grid.V_READ:
            point_op = op._replace(R_G=R_G, V_READ=V_READ, V_SET=v_set)
            report = gate_report(params, point_op, VrefPolicy.balanced(), N, rng, insts=insts)
            rm_nom, rm_3sigma = report.margins
            points.append(SweepPoint(R_G, V_READ, v_set, op.T, rm_nom, rm_3sigma, report.V_REF,
                                     float(np.mean([row.rdr for row in report.rows])),
                                     float(np.mean([row.ber for row in report.rows])),
                                     report.rows[0].wer, report.avg_error, report.avg_energy))
    return points


def temperature_analysis(params, op, T_list, N, rng, run_log=None):
    '''
    Per-temperature gate quantities under a constant V_REF (the balanced
    value at 300 K) and under the PTAT table.

    Args:
        params (DeviceParams): device description.
        op (OperatingPoint): bias point of the study; op.T is ignored.
        T_list (list): temperatures in kelvin.
        N (int): trials per campaign.
        rng (RngSpec): random streams.

    Returns:
        list: one TemperatureRecord per temperature, in increasing T.
    '''
    if any(not params.t_min <= T <= params.t_max for T in T_list):
        raise ConfigError('temperatures must lie in [{}, {}] K'.format(params.t_min, params.t_max))
    insts = _shared_instances(rng, N, params)
    temps = sorted(set(float(T) for T in T_list))
    table = ptat_vref_table(params, op, sorted(set(temps) | {REFERENCE_T}), N, rng, insts, run_log)
    constant = VrefPolicy.constant(table[REFERENCE_T])
    ptat = VrefPolicy.ptat(table)
    nominal = DeviceInstance.nominal(params)

    records = []
    for T in temps:
        t_op = op._replace(T=T)
        voltages = read_campaign(params, t_op, N, rng, insts)
        with_constant = gate_report(params, t_op, constant, N, rng, voltages=voltages)
        with_ptat = gate_report(params, t_op, ptat, N, rng, voltages=voltages)
        rm_nom, rm_3sigma = with_ptat.margins
        records.append(TemperatureRecord(T, average_rdr(params, t_op), set_wer(params, t_op, nominal),
                                         rm_nom, rm_3sigma, constant.V_REF, with_ptat.V_REF,
                                         with_constant.avg_error, with_ptat.avg_error,
                                         with_ptat.avg_energy))
        if run_log is not None:
            run_log.append('T = {} K: error {:.3g} (constant V_REF), {:.3g} (PTAT V_REF)'.format(
                T, with_constant.avg_error, with_ptat.avg_error))
    return records


def device_characteristics(params, temperatures, V_MTJ_values, pulse=config.CHARACTERIZE_PULSE):
    '''
    Temperature-dependent device curves: resistances and TMR, thermal
    stability and critical currents, and write error rate against the bias
    across a nominal device.

    Returns:
        tuple: (rt_rows, delta_ic_rows, wer_rows) lists of tuples.
    '''
    nominal = DeviceInstance.nominal(params)
    rt_rows, delta_ic_rows, wer_rows = [], [], []
    for T in temperatures:
        r_low = float(resistance_parallel(params, nominal))
        r_high = float(resistance(params, 0, 0.0, T, nominal))
        rt_rows.append((T, r_low, r_high, interpolate_thermal(params, T).TMR0))
        delta_ic_rows.append((T, thermal_stability(params, T, nominal),
                              critical_current(params, T, SwitchDirection.AP_TO_P, nominal),
                              critical_current(params, T, SwitchDirection.P_TO_AP, nominal)))
        for v in V_MTJ_values:
            current = v / float(resistance(params, 0, v, T, nominal))
            wer_rows.append((T, v, write_error_rate(params, current, pulse, T, SwitchDirection.AP_TO_P, nominal)))
    return rt_rows, delta_ic_rows, wer_rows
