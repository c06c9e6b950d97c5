'''
Serializes results to CSV/JSON and prints the console summaries.
Floats are written with repr(), the shortest string that reads back to the
same value, so identical runs produce identical files.
'''
import csv
import json
import math
import os

import numpy as np

from engine import COMBO_NAME
from mtj.params import DEVICE_SCALAR_FIELDS


def _plain(value):
    # numpy scalars and tuples to builtin types
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _cell(value):
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    return '' if value is None else str(value)


def _json_value(value):
    value = _plain(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, list):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return value


def write_json(path, obj):
    print('Writing', path)
    with open(path, 'w') as json_file:
        json.dump(_json_value(obj), json_file, indent=2, sort_keys=False)
        json_file.write('\n')


def write_table(directory, name, columns, rows, fmt='csv'):
    '''
    Writes one table as <name>.csv, or as a JSON list of records when fmt is "json".

    Returns:
        str: path of the written file.
    '''
    if fmt == 'json':
        path = os.path.join(directory, name + '.json')
        write_json(path, [dict(zip(columns, row)) for row in rows])
        return path
    path = os.path.join(directory, name + '.csv')
    print('Writing', path)
    with open(path, 'w', newline='') as csv_file:
        writer = csv.writer(csv_file, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_records(directory, name, records, fmt='csv'):
    '''Table of namedtuples, one column per field.'''
    return write_table(directory, name, records[0]._fields if records else (), records, fmt)


def write_run_log(directory, filename, run_log):
    path = os.path.join(directory, filename + '.txt')
    print('Writing', path)
    with open(path, 'w') as log_file:
        log_file.write('\n'.join(run_log))
        log_file.write('\n')


def gate_rows(report):
    '''
    The four combination rows followed by the averages row.
    '''
    rows = [(COMBO_NAME(r.combo), r.rdr, r.ber, r.wer, r.error, r.energy, r.output_bit)
            for r in report.rows]
    n = len(report.rows)
    rows.append(('avg', sum(r.rdr for r in report.rows) / n, sum(r.ber for r in report.rows) / n,
                 sum(r.wer for r in report.rows) / n, report.avg_error, report.avg_energy, None))
    return rows


GATE_COLUMNS = ('combo', 'rdr', 'ber', 'wer', 'error', 'energy', 'output_bit')


def read_summary(summaries, margins, ber_report):
    sum00, sum_neq, sum11 = summaries
    return {
        'mu_00': sum00.mu, 'sigma_00': sum00.sigma,
        'mu_neq': sum_neq.mu, 'sigma_neq': sum_neq.sigma,
        'mu_11': sum11.mu, 'sigma_11': sum11.sigma,
        'n': sum00.n,
        'RM_nom': margins[0], 'RM_3sigma': margins[1],
        'V_REF': ber_report.V_REF,
        'balanced_ber': ber_report.balanced_ber,
        'worst_ber_00': ber_report.worst_ber_00,
        'worst_ber_neq': ber_report.worst_ber_neq,
        'ber_11': ber_report.ber_11,
        'worst_ber_11': ber_report.worst_ber_11,
    }


def calibrated_toml(result):
    '''[device] block holding every scalar device field of the calibrated parameters.'''
    lines = ['[device]']
    for name in DEVICE_SCALAR_FIELDS:
        lines.append('{} = {}'.format(name, repr(float(getattr(result.params, name)))))
    return '\n'.join(lines) + '\n'


def write_text(path, text):
    print('Writing', path)
    with open(path, 'w') as text_file:
        text_file.write(text)


def print_gate_summary(report):
    print('\n---- SIMPLY gate ----')
    print(f'V_REF: {report.V_REF * 1e3:.2f} mV')
    for row in report.rows:
        print(f'{COMBO_NAME(row.combo)}: error {row.error:.3e}, energy {row.energy * 1e15:.1f} fJ, '
              f"Q' = {row.output_bit}")
    print(f'Average error: {report.avg_error:.3e}')
    print(f'Average energy: {report.avg_energy * 1e15:.1f} fJ')
    print('\n----------------')


def print_heldout_summary(checks):
    passed = sum(1 for c in checks if c.passed)
    print(f'\n---- Held-out checks: {passed}/{len(checks)} passed ----')
    for check in checks:
        print(f"{check.name}: {check.measured:.4g} (target {check.target:.4g}) {'PASS' if check.passed else 'FAIL'}")
    print('\n----------------')
