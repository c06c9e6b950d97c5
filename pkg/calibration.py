'''
Fits the model constants that the device data leaves open (N_eff, k_ic, c_tox
and E_comp) to four anchor quantities of the reference gate, then checks the
calibrated model against held-out numbers that were not used in the fit.
'''
from collections import namedtuple
import math

from scipy.optimize import bisect

import config
from engine import VrefPolicy, gate_report
from explorer import SweepGrid, find_min_ber, sweep_read, temperature_analysis, vset_for_target_wer
from mtj.circuit import energy_read, gate_rdr, set_wer, solve_read
from mtj.errors import CalibrationError, ConfigError, SimulationError
from mtj.params import DeviceInstance, OperatingPoint
from mtj.variation import campaign_summaries, read_campaign, read_margins, sample_instances

# (low, high, xtol) of every 1-D fit
BRACKETS = {
    'N_eff': (0.7, 1.0, 1e-7),
    'k_ic': (0.05, 2.0, 1e-7),
    'c_tox': (1e9, 2e10, 1e4),
}
FLOOR = 1e-300


class CalibrationAnchors(namedtuple('_CalibrationAnchors',
                                    ['rdr_00', 'wer_00', 'rm_3sigma', 'energy_11',
                                     'T', 'R_G', 'V_READ', 'V_SET', 'pulse'],
                                    defaults=[config.ANCHOR_RDR_00, config.ANCHOR_WER_00,
                                              config.ANCHOR_RM_3SIGMA, config.ANCHOR_ENERGY_11,
                                              300.0, 10e3, 0.35, config.ANCHOR_V_SET, 10e-9])):
    '''
    Target values of the fit and the operating point they were measured at.
    '''

    def validate(self):
        for name, value in self._asdict().items():
            if not value > 0:
                raise ConfigError('calibration anchor {} must be positive, got {}'.format(name, value))
        return self

    def operating_point(self):
        return OperatingPoint(T=self.T, R_G=self.R_G, V_READ=self.V_READ, t_READ=self.pulse,
                              V_SET=self.V_SET, t_SET=self.pulse)


CalibrationResult = namedtuple('CalibrationResult', ['params', 'N_eff', 'k_ic', 'k_w', 'c_tox', 'E_comp',
                                                     'residuals', 'loops', 'heldout'])

HeldoutCheck = namedtuple('HeldoutCheck', ['name', 'measured', 'target', 'low', 'high', 'passed'])


def _fit(constant, objective, run_log=None):
    low, high, xtol = BRACKETS[constant]
    f_low, f_high = objective(low), objective(high)
    if not (math.isfinite(f_low) and math.isfinite(f_high)) or f_low * f_high > 0:
        raise CalibrationError(constant, 'objective has no sign change over [{:g}, {:g}] ({:.3g}, {:.3g})'
                               .format(low, high, f_low, f_high))
    value = bisect(objective, low, high, xtol=xtol)
    if run_log is not None:
        run_log.append('fit {} = {:.6g}'.format(constant, value))
    return value


def _log_gap(measured, target):
    return math.log10(max(measured, FLOOR)) - math.log10(target)


def _change(new, old):
    # relative to the larger magnitude, so a zero starting value counts as a full move
    scale = max(abs(new), abs(old))
    return abs(new - old) / scale if scale > 0 else 0.0


def _anchor_values(params, anchors, op, N, rng, insts):
    nominal = DeviceInstance.nominal(params)
    pair = (nominal, nominal)
    sum00, sum_neq, _ = campaign_summaries(read_campaign(params, op, N, rng, insts))
    e_11 = energy_read(solve_read(params, (1, 1), op, pair), op) + params.E_comp
    return {
        'rdr_00': (gate_rdr(params, (0, 0), op, pair), anchors.rdr_00),
        'wer_00': (set_wer(params, op, nominal), anchors.wer_00),
        'rm_3sigma': (read_margins(sum00, sum_neq)[1], anchors.rm_3sigma),
        'energy_11': (e_11, anchors.energy_11),
    }


def calibrate(params, anchors=None, N=config.NUM_TRIALS, rng=None, run_log=None):
    '''
    Sequential 1-D fits iterated until no constant moves by more than
    CALIBRATION_REL_TOL between two passes.

    Args:
        params (DeviceParams): starting point; its N_eff, k_ic and c_tox are refitted.
        anchors (CalibrationAnchors): targets, defaults from config.py.
        N (int): trials of the read-margin campaign.
        rng (RngSpec): random streams of the campaign.
        run_log (list): optional list of log lines to append to.

    Returns:
        CalibrationResult with residuals as {anchor: (measured, target)}.

    Raises:
        CalibrationError: if a bracket holds no root or the passes do not settle.
    '''
    anchors = (anchors or CalibrationAnchors()).validate()
    op = anchors.operating_point()
    nominal = DeviceInstance.nominal(params)
    pair = (nominal, nominal)
    # c_tox does not enter the geometry draw, so one instance set serves every pass
    insts = (sample_instances(rng, N, 0, params), sample_instances(rng, N, 1, params))

    current = params._replace(k_w=1.0)
    for loop in range(1, config.CALIBRATION_MAX_LOOPS + 1):
        previous = current
        n_eff = _fit('N_eff', lambda x: _log_gap(gate_rdr(current._replace(N_eff=x), (0, 0), op, pair),
                                                 anchors.rdr_00), run_log)
        current = current._replace(N_eff=n_eff)
        k_ic = _fit('k_ic', lambda x: _log_gap(set_wer(current._replace(k_ic=x), op, nominal),
                                               anchors.wer_00), run_log)
        current = current._replace(k_ic=k_ic)

        def rm_gap(c_tox):
            trial = current._replace(c_tox=c_tox)
            sum00, sum_neq, _ = campaign_summaries(read_campaign(trial, op, N, rng, insts))
            return read_margins(sum00, sum_neq)[1] - anchors.rm_3sigma

        current = current._replace(c_tox=_fit('c_tox', rm_gap, run_log))
        e_read_11 = energy_read(solve_read(current, (1, 1), op, pair), op)
        if e_read_11 >= anchors.energy_11:
            raise CalibrationError('E_comp', 'READ energy of (1,1) already exceeds the anchor')
        current = current._replace(E_comp=anchors.energy_11 - e_read_11)

        moved = max(_change(getattr(current, name), getattr(previous, name))
                    for name in ('N_eff', 'k_ic', 'c_tox', 'E_comp'))
        if run_log is not None:
            run_log.append('calibration pass {}: largest relative change {:.3g}'.format(loop, moved))
        if moved < config.CALIBRATION_REL_TOL:
            break
    else:
        raise CalibrationError('N_eff/k_ic', 'no joint convergence after {} passes'
                               .format(config.CALIBRATION_MAX_LOOPS))

    current.validate()
    residuals = _anchor_values(current, anchors, op, N, rng, insts)
    return CalibrationResult(current, current.N_eff, current.k_ic, current.k_w, current.c_tox,
                             current.E_comp, residuals, loop, None)


def _band(name, measured, target, low, high):
    return HeldoutCheck(name, measured, target, low, high, bool(low <= measured <= high))


def _factor(name, measured, target, factor):
    return _band(name, measured, target, target / factor, target * factor)


def _relative(name, measured, target, rel):
    return _band(name, measured, target, target - abs(target) * rel, target + abs(target) * rel)


def _absolute(name, measured, target, tol):
    return _band(name, measured, target, target - tol, target + tol)


def _failed(name, target, error, run_log):
    if run_log is not None:
        run_log.append('{}: {}'.format(name, error))
    return HeldoutCheck(name, math.nan, target, math.nan, math.nan, False)


def _reference_checks(params, N, rng):
    report = gate_report(params, OperatingPoint(), VrefPolicy.balanced(), N, rng)
    ber = report.ber_report
    return [
        _absolute('V_REF', report.V_REF, 150.8e-3, 5e-3),
        _factor('balanced_ber', ber.balanced_ber, 2.6e-5, 3.0),
        _factor('worst_ber_00', ber.worst_ber_00, 1.7e-3, 3.0),
        _factor('worst_ber_neq', ber.worst_ber_neq, 7.8e-4, 3.0),
        _factor('avg_error', report.avg_error, 8.2e-4, 2.0),
        _relative('avg_energy', report.avg_energy, 160.1e-15, 0.10),
        _relative('energy_00', report.rows[0].energy, 318.2e-15, 0.15),
        _relative('energy_01', report.rows[1].energy, 104.2e-15, 0.15),
    ]


def _sweep_checks(params, N, rng, grid):
    op = OperatingPoint()
    v_set = {R_G: vset_for_target_wer(params, R_G, op.T, config.TARGET_WER, op) for R_G in (5e3, 15e3, 30e3)}
    points = sweep_read(params, grid._replace(R_G=[5e3, 30e3]), N, rng, op)
    v_5k, ber_5k = find_min_ber(params, 5e3, grid, N, rng, op, points)
    v_30k, ber_30k = find_min_ber(params, 30e3, grid, N, rng, op, points)
    energy_30k = gate_report(params, op._replace(R_G=30e3, V_READ=0.6, V_SET=v_set[30e3]),
                             VrefPolicy.balanced(), N, rng).avg_energy
    energy_15k = gate_report(params, op._replace(R_G=15e3, V_READ=0.375, V_SET=v_set[15e3]),
                             VrefPolicy.balanced(), N, rng).avg_energy
    return [
        _relative('vset_5k', v_set[5e3], 0.67, 0.10),
        _relative('vset_30k', v_set[30e3], 1.24, 0.10),
        _absolute('min_ber_v_read_5k', v_5k, 0.35, 0.05),
        _factor('min_ber_5k', ber_5k, 3.7e-3, 3.0),
        _absolute('min_ber_v_read_30k', v_30k, 0.6, 0.05),
        _factor('min_ber_30k', ber_30k, 1.8e-4, 3.0),
        _relative('energy_30k_0.6V', energy_30k, 201.8e-15, 0.10),
        _relative('energy_15k_0.375V', energy_15k, 159.4e-15, 0.10),
    ]


def _temperature_checks(params, N, rng):
    op = OperatingPoint(R_G=config.TEMPERATURE_R_G, V_READ=config.TEMPERATURE_V_READ,
                        V_SET=config.TEMPERATURE_V_SET)
    records = {r.T: r for r in temperature_analysis(params, op, [250.0, 300.0, 350.0], N, rng)}
    cold, hot = records[250.0], records[350.0]
    return [
        _band('rdr_ratio_350_250', hot.avg_rdr / max(cold.avg_rdr, 1e-300), 1e8, 1e6, math.inf),
        _band('wer_ratio_250_350', cold.wer_00 / max(hot.wer_00, 1e-300), 144.0, 30.0, 500.0),
        _absolute('rm_nom_change', hot.RM_nom / cold.RM_nom - 1.0, -0.15, 0.05),
        _absolute('rm_3sigma_change', hot.RM_3sigma / cold.RM_3sigma - 1.0, -0.40, 0.15),
        _band('ptat_gain_250', cold.avg_error_constant / cold.avg_error_ptat, 5.4, 2.0, math.inf),
        _band('ptat_gain_350', hot.avg_error_constant / hot.avg_error_ptat, 4.4, 2.0, math.inf),
        _band('ptat_error_max', max(r.avg_error_ptat for r in records.values()), 1.1e-3, 0.0, 1.1e-3),
        _absolute('energy_change', hot.avg_energy / cold.avg_energy - 1.0, -0.08, 0.04),
    ]


def validate_heldout(params, N=config.NUM_TRIALS, rng=None, grid=None, run_log=None):
    '''
    Compares the calibrated model with the held-out reference numbers.
    Failures inside one group of checks are reported, not raised.

    Returns:
        list: HeldoutCheck records in a fixed order.
    '''
    grid = grid or SweepGrid.from_ranges()
    checks = []
    groups = (('reference', 8.2e-4, lambda: _reference_checks(params, N, rng)),
              ('sweep', 0.67, lambda: _sweep_checks(params, N, rng, grid)),
              ('temperature', 1.1e-3, lambda: _temperature_checks(params, N, rng)))
    for name, target, run in groups:
        try:
            checks.extend(run())
        except SimulationError as error:
            checks.append(_failed(name, target, error, run_log))
    if run_log is not None:
        for check in checks:
            run_log.append('held-out {}: {:.4g} (target {:.4g}) {}'.format(
                check.name, check.measured, check.target, 'PASS' if check.passed else 'FAIL'))
    return checks
