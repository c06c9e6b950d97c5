'''
Command-line front end: run configuration, command dispatch and exit codes.
'''
from collections import namedtuple
import argparse
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import config
from calibration import CalibrationAnchors, calibrate, validate_heldout
from engine import COMBO_NAME, VrefPolicy, false_op, gate_report, truth_table_check
from explorer import (TARGET_WER_RANGE, SweepGrid, device_characteristics, inclusive_range, sweep_full,
                      sweep_read, sweep_wer, temperature_analysis, vset_targets, wer_vs_vset)
from mtj.errors import ConfigError, ModelError, SimulationError
from mtj.params import DEVICE_SCALAR_FIELDS, DeviceParams, OperatingPoint
from mtj.variation import COMBOS, MIN_TRIALS, RngSpec, campaign_summaries, equal_ber_vref, read_campaign, read_margins
from results_writer import (GATE_COLUMNS, calibrated_toml, gate_rows, print_gate_summary,
                            print_heldout_summary, read_summary, write_json, write_records, write_run_log,
                            write_table, write_text)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

COMMANDS = ('characterize', 'read', 'gate', 'sweep', 'temperature', 'calibrate')
FORMATS = ('csv', 'json')
MAX_SEED = 2 ** 64

SECTIONS = {
    'device': DEVICE_SCALAR_FIELDS,
    'operating': OperatingPoint._fields,
    'campaign': ('trials', 'master_seed'),
    'sweep': ('R_G', 'V_READ_start', 'V_READ_stop', 'V_READ_step', 'V_SET_start', 'V_SET_stop',
              'V_SET_step', 'T', 'target_wer'),
    'temperature': ('R_G', 'V_READ', 'V_SET', 'T'),
    'output': ('directory', 'format'),
}

RunConfig = namedtuple('RunConfig', ['params', 'op', 'trials', 'master_seed', 'grid', 'target_wer',
                                     'temperature_op', 'temperatures', 'directory', 'format'])


def _number(section, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError('[{}] {} must be a number, got {!r}'.format(section, key, value))
    return float(value)


def _numbers(section, key, value):
    if not isinstance(value, list) or not value:
        raise ConfigError('[{}] {} must be a non-empty list of numbers'.format(section, key))
    return [_number(section, key, v) for v in value]


def _integer(section, key, value, low, high):
    if isinstance(value, bool) or not isinstance(value, int) or not low <= value < high:
        raise ConfigError('[{}] {} must be an integer in [{}, {}), got {!r}'.format(section, key, low, high, value))
    return value


def _read_toml(path):
    try:
        with open(path, 'rb') as config_file:
            raw = tomllib.load(config_file)
    except OSError as error:
        raise ConfigError('cannot read configuration file {}: {}'.format(path, error))
    except tomllib.TOMLDecodeError as error:
        raise ConfigError('{} is not valid TOML: {}'.format(path, error))
    for section, values in raw.items():
        if section not in SECTIONS:
            raise ConfigError('unknown section [{}] in {}'.format(section, path))
        if not isinstance(values, dict):
            raise ConfigError('{} must be a [section], not a top-level key'.format(section))
        unknown = sorted(set(values) - set(SECTIONS[section]))
        if unknown:
            raise ConfigError('unknown key(s) in [{}]: {}'.format(section, ', '.join(unknown)))
    return raw


def _range(sweep, name, default):
    return tuple(_number('sweep', '{}_{}'.format(name, part), sweep[name + '_' + part])
                 if name + '_' + part in sweep else fallback
                 for part, fallback in zip(('start', 'stop', 'step'), default))


def load_run_config(path=None):
    '''
    Reads a TOML run configuration on top of the built-in defaults.

    Args:
        path (str): configuration file, or None for the defaults only.

    Returns:
        RunConfig: validated settings.

    Raises:
        ConfigError: unreadable file, unknown section or key, or an invalid value.
    '''
    raw = _read_toml(path) if path is not None else {}
    device = raw.get('device', {})
    operating = raw.get('operating', {})
    campaign = raw.get('campaign', {})
    sweep = raw.get('sweep', {})
    temperature = raw.get('temperature', {})
    output = raw.get('output', {})

    params = DeviceParams()._replace(**{k: _number('device', k, v) for k, v in device.items()}).validate()
    op = OperatingPoint()._replace(**{k: _number('operating', k, v) for k, v in operating.items()}).validate()
    trials = _integer('campaign', 'trials', campaign.get('trials', config.NUM_TRIALS), MIN_TRIALS, 10 ** 9)
    seed = _integer('campaign', 'master_seed', campaign.get('master_seed', config.MASTER_SEED), 0, MAX_SEED)

    grid = SweepGrid.from_ranges(
        R_G=_numbers('sweep', 'R_G', sweep['R_G']) if 'R_G' in sweep else None,
        V_READ=_range(sweep, 'V_READ', config.SWEEP_V_READ),
        V_SET=_range(sweep, 'V_SET', config.SWEEP_V_SET),
        T=_numbers('sweep', 'T', sweep['T']) if 'T' in sweep else None)
    target_wer = _number('sweep', 'target_wer', sweep.get('target_wer', config.TARGET_WER))
    if not TARGET_WER_RANGE[0] < target_wer < TARGET_WER_RANGE[1]:
        raise ConfigError('[sweep] target_wer must lie in ({:g}, {:g}), got {}'.format(
            TARGET_WER_RANGE[0], TARGET_WER_RANGE[1], target_wer))

    temperature_op = op._replace(
        R_G=_number('temperature', 'R_G', temperature.get('R_G', config.TEMPERATURE_R_G)),
        V_READ=_number('temperature', 'V_READ', temperature.get('V_READ', config.TEMPERATURE_V_READ)),
        V_SET=_number('temperature', 'V_SET', temperature.get('V_SET', config.TEMPERATURE_V_SET))).validate()
    temperatures = _numbers('temperature', 'T', temperature['T']) if 'T' in temperature else list(config.SWEEP_T)

    directory = output.get('directory', config.OUTPUT_DIRECTORY)
    fmt = output.get('format', config.OUTPUT_FORMAT)
    if not isinstance(directory, str) or not directory:
        raise ConfigError('[output] directory must be a non-empty string')
    if fmt not in FORMATS:
        raise ConfigError('[output] format must be one of {}, got {!r}'.format(FORMATS, fmt))
    return RunConfig(params, op, trials, seed, grid, target_wer, temperature_op, temperatures, directory, fmt)


def apply_flags(run_config, args):
    '''Command-line flags take precedence over the configuration file.'''
    overrides = {}
    if args.seed is not None:
        overrides['master_seed'] = _integer('flags', '--seed', args.seed, 0, MAX_SEED)
    if args.trials is not None:
        overrides['trials'] = _integer('flags', '--trials', args.trials, MIN_TRIALS, 10 ** 9)
    if args.out is not None:
        overrides['directory'] = args.out
    if args.format is not None:
        overrides['format'] = args.format
    return run_config._replace(**overrides)


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit code 1)
    def error(self, message):
        self.print_usage()
        raise ConfigError(message)


def parse_args(argv=None):
    '''
    Parses arguments corresponding to the simulator command line.
    '''
    parser = _ArgumentParser(prog='python3 main.py',
                             description='Deterministic simulator of the SIMPLY logic gate on STT-MTJs')
    parser.add_argument('command', choices=COMMANDS, help='What to compute')
    parser.add_argument('--config', type=str, default=None, help='TOML run configuration file')
    parser.add_argument('--seed', type=int, default=None, help='Master seed, overrides [campaign] master_seed')
    parser.add_argument('--trials', type=int, default=None, help='Monte Carlo trials, overrides [campaign] trials')
    parser.add_argument('--out', type=str, default=None, help='Output directory, overrides [output] directory')
    parser.add_argument('--format', choices=FORMATS, default=None, help='Table format, overrides [output] format')
    return parser.parse_args(argv)


def cmd_characterize(run_config, run_log):
    rt_rows, delta_ic_rows, wer_rows = device_characteristics(
        run_config.params, run_config.grid.T, inclusive_range(*config.CHARACTERIZE_V_MTJ))
    out, fmt = run_config.directory, run_config.format
    write_table(out, 'characterize_rt', ('T', 'R_L', 'R_H', 'TMR0'), rt_rows, fmt)
    write_table(out, 'characterize_delta_ic', ('T', 'delta', 'I_c_AP_to_P', 'I_c_P_to_AP'), delta_ic_rows, fmt)
    write_table(out, 'characterize_wer', ('T', 'V_MTJ', 'WER'), wer_rows, fmt)
    run_log.append('characterized {} temperatures'.format(len(rt_rows)))


def cmd_read(run_config, run_log):
    params, op = run_config.params, run_config.op
    voltages = read_campaign(params, op, run_config.trials, RngSpec(run_config.master_seed))
    summaries = campaign_summaries(voltages)
    ber = equal_ber_vref(summaries[0], summaries[1], op.delta_ref, summaries[2])
    rows = [(COMBO_NAME(combo), trial, v_g) for combo in COMBOS for trial, v_g in enumerate(voltages[combo])]
    write_table(run_config.directory, 'read_distributions', ('combo', 'trial', 'V_G'), rows, run_config.format)
    write_json(os.path.join(run_config.directory, 'read_summary.json'),
               read_summary(summaries, read_margins(summaries[0], summaries[1]), ber))
    run_log.append('read campaign: {} trials, V_REF = {:.6g} V'.format(run_config.trials, ber.V_REF))


def cmd_gate(run_config, run_log):
    params, op, out, fmt = run_config.params, run_config.op, run_config.directory, run_config.format
    if not truth_table_check(params, op, run_log):
        raise ModelError('the error-free gate does not follow the IMPLY truth table at this operating point')
    run_log.append('IMPLY truth table verified')
    report = gate_report(params, op, VrefPolicy.balanced(), run_config.trials,
                         RngSpec(run_config.master_seed), run_log)
    write_table(out, 'gate_report', GATE_COLUMNS, gate_rows(report), fmt)
    write_records(out, 'false_op', [false_op(params, state, op) for state in (0, 1)], fmt)
    write_table(out, 'wer_vs_vset', ('V_SET', 'WER'), wer_vs_vset(params, op, run_config.grid.V_SET), fmt)
    print_gate_summary(report)


def cmd_sweep(run_config, run_log):
    params, op, grid = run_config.params, run_config.op, run_config.grid
    out, fmt = run_config.directory, run_config.format
    rng = RngSpec(run_config.master_seed)
    write_records(out, 'sweep_read', sweep_read(params, grid, run_config.trials, rng, op, run_log), fmt)
    write_records(out, 'sweep_full', sweep_full(params, grid, run_config.trials, rng, op,
                                                run_config.target_wer, run_log), fmt)
    write_table(out, 'vset_targets', ('R_G', 'V_SET'),
                vset_targets(params, grid, run_config.target_wer, op, op.T), fmt)
    write_table(out, 'sweep_wer', ('R_G', 'V_SET', 'WER'), sweep_wer(params, grid, op, op.T), fmt)


def cmd_temperature(run_config, run_log):
    records = temperature_analysis(run_config.params, run_config.temperature_op, run_config.temperatures,
                                   run_config.trials, RngSpec(run_config.master_seed), run_log)
    write_records(run_config.directory, 'temperature', records, run_config.format)


def cmd_calibrate(run_config, run_log):
    rng = RngSpec(run_config.master_seed)
    result = calibrate(run_config.params, CalibrationAnchors(), run_config.trials, rng, run_log)
    checks = validate_heldout(result.params, run_config.trials, rng, run_config.grid, run_log)
    result = result._replace(heldout=checks)
    write_json(os.path.join(run_config.directory, 'calibration.json'), {
        'constants': {'N_eff': result.N_eff, 'k_ic': result.k_ic, 'k_w': result.k_w,
                      'c_tox': result.c_tox, 'E_comp': result.E_comp},
        'loops': result.loops,
        'residuals': {name: {'measured': measured, 'target': target}
                      for name, (measured, target) in result.residuals.items()},
        'heldout': [check._asdict() for check in checks],
    })
    write_text(os.path.join(run_config.directory, 'calibrated.toml'), calibrated_toml(result))
    print_heldout_summary(checks)


COMMAND_TABLE = {
    'characterize': cmd_characterize,
    'read': cmd_read,
    'gate': cmd_gate,
    'sweep': cmd_sweep,
    'temperature': cmd_temperature,
    'calibrate': cmd_calibrate,
}


def run_command(args):
    '''
    Runs one command and maps failures to exit codes.

    Returns:
        int: 0 on success, 1 on configuration errors, 2 on numerical or
        calibration failures, 3 on I/O failures.
    '''
    try:
        run_config = apply_flags(load_run_config(args.config), args)
    except ConfigError as error:
        print('Configuration error:', error)
        return EXIT_CONFIG

    print('SIMPLY STT-MTJ gate simulator')
    print('Running', args.command, 'with seed', run_config.master_seed, 'and', run_config.trials, 'trials')
    run_log = ['command {} seed {} trials {}'.format(args.command, run_config.master_seed, run_config.trials)]
    try:
        os.makedirs(run_config.directory, exist_ok=True)
        COMMAND_TABLE[args.command](run_config, run_log)
        write_run_log(run_config.directory, config.RUN_LOG_FILENAME, run_log)
    except ConfigError as error:
        print('Configuration error:', error)
        return EXIT_CONFIG
    except SimulationError as error:
        print('Numerical failure:', error)
        return EXIT_NUMERIC
    except OSError as error:
        print('I/O failure:', error)
        return EXIT_IO
    return EXIT_OK
