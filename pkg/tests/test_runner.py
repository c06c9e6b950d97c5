"""
Command line: configuration loading, output files, determinism and exit codes.

Run: pytest tests/test_runner.py -v
"""

import csv
import json
from pathlib import Path

import pytest

import config
from main import main
from mtj.errors import ConfigError
from runner import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, load_run_config

ROOT = Path(__file__).resolve().parents[1]
N_SMALL = "200"
SMALL_GRID_TOML = ('[sweep]\nR_G = [10e3]\nV_READ_start = 0.3\nV_READ_stop = 0.4\nV_READ_step = 0.05\n'
                   'V_SET_start = 0.7\nV_SET_stop = 0.9\nV_SET_step = 0.1\nT = [300.0]\n'
                   '[temperature]\nT = [250.0, 300.0, 350.0]\n')


def _read_csv(path):
    with open(path, newline='') as csv_file:
        return list(csv.reader(csv_file))


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_defaults_without_file():
    run_config = load_run_config()
    assert run_config.trials == config.NUM_TRIALS
    assert run_config.master_seed == config.MASTER_SEED
    assert run_config.op.R_G == 10e3
    assert run_config.temperature_op.R_G == config.TEMPERATURE_R_G
    assert run_config.format == 'csv'


def test_file_overrides(tmp_path):
    path = _write(tmp_path / 'run.toml', '[device]\nk_ic = 0.3\n[operating]\nR_G = 15e3\n'
                                         '[campaign]\ntrials = 300\n[sweep]\nR_G = [5e3]\nV_READ_step = 0.05\n')
    run_config = load_run_config(path)
    assert run_config.params.k_ic == 0.3
    assert run_config.op.R_G == 15e3
    assert run_config.trials == 300
    assert run_config.grid.R_G == [5e3]
    assert len(run_config.grid.V_READ) == 17


@pytest.mark.parametrize("text", [
    '[device]\nbogus = 1.0\n',
    '[extras]\nx = 1\n',
    '[campaign]\ntrials = 10\n',
    '[campaign]\nmaster_seed = -1\n',
    '[output]\nformat = "xml"\n',
    '[operating]\nV_RESET = 0.5\n',
    '[sweep]\ntarget_wer = 0.7\n',
    '[sweep]\ntarget_wer = 0.0\n',
    '[device]\nN_eff = "high"\n',
    'not toml at all [',
])
def test_invalid_files_rejected(tmp_path, text):
    with pytest.raises(ConfigError):
        load_run_config(_write(tmp_path / 'bad.toml', text))


def test_committed_reference_config():
    run_config = load_run_config(str(ROOT / 'configs' / 'reference_gate.toml'))
    assert run_config.op.V_SET == 0.78
    assert run_config.temperature_op.V_SET == 0.89


def test_read_outputs(tmp_path):
    out = tmp_path / 'read'
    assert main(['read', '--out', str(out), '--trials', N_SMALL, '--seed', '11']) == EXIT_OK
    rows = _read_csv(out / 'read_distributions.csv')
    assert rows[0] == ['combo', 'trial', 'V_G']
    assert len(rows) == 4 * int(N_SMALL) + 1
    with open(out / 'read_summary.json') as summary_file:
        summary = json.load(summary_file)
    assert summary['mu_00'] < summary['V_REF'] < summary['mu_neq']
    assert summary['RM_3sigma'] == summary['RM_nom'] - 3 * (summary['sigma_00'] + summary['sigma_neq'])
    assert (out / 'run_log.txt').exists()


@pytest.mark.parametrize("command,files", [
    ('read', ['read_distributions.csv', 'read_summary.json', 'run_log.txt']),
    ('gate', ['gate_report.csv', 'false_op.csv', 'wer_vs_vset.csv', 'run_log.txt']),
    ('characterize', ['characterize_rt.csv', 'characterize_delta_ic.csv', 'characterize_wer.csv']),
    ('sweep', ['sweep_read.csv', 'sweep_full.csv', 'vset_targets.csv', 'sweep_wer.csv', 'run_log.txt']),
    ('temperature', ['temperature.csv', 'run_log.txt']),
    ('calibrate', ['calibration.json', 'calibrated.toml', 'run_log.txt']),
])
def test_same_seed_gives_identical_files(tmp_path, command, files):
    path = _write(tmp_path / 'small.toml', SMALL_GRID_TOML)
    for name in ('first', 'second'):
        assert main([command, '--config', path, '--out', str(tmp_path / name),
                     '--trials', N_SMALL, '--seed', '3']) == EXIT_OK
    for filename in files:
        assert (tmp_path / 'first' / filename).read_bytes() == (tmp_path / 'second' / filename).read_bytes()


def test_gate_report_file(tmp_path):
    assert main(['gate', '--out', str(tmp_path), '--trials', N_SMALL]) == EXIT_OK
    rows = _read_csv(tmp_path / 'gate_report.csv')
    assert rows[0] == ['combo', 'rdr', 'ber', 'wer', 'error', 'energy', 'output_bit']
    assert [r[0] for r in rows[1:]] == ['00', '01', '10', '11', 'avg']
    assert [r[6] for r in rows[1:5]] == ['1', '1', '0', '1']
    energies = [float(r[5]) for r in rows[1:5]]
    assert float(rows[5][5]) == pytest.approx(sum(energies) / 4, rel=1e-12)


def test_json_format(tmp_path):
    assert main(['gate', '--out', str(tmp_path), '--trials', N_SMALL, '--format', 'json']) == EXIT_OK
    with open(tmp_path / 'gate_report.json') as report_file:
        records = json.load(report_file)
    assert len(records) == 5
    assert records[-1]['combo'] == 'avg'


def test_characterize_columns(tmp_path):
    assert main(['characterize', '--out', str(tmp_path)]) == EXIT_OK
    rows = _read_csv(tmp_path / 'characterize_rt.csv')
    assert rows[0] == ['T', 'R_L', 'R_H', 'TMR0']
    tmr0 = {float(r[0]): float(r[3]) for r in rows[1:]}
    assert tmr0[250.0] == pytest.approx(1.66)
    assert tmr0[350.0] == pytest.approx(1.34)


def test_sweep_command(tmp_path):
    path = _write(tmp_path / 'small.toml', SMALL_GRID_TOML)
    out = tmp_path / 'sweep'
    assert main(['sweep', '--config', path, '--out', str(out), '--trials', N_SMALL]) == EXIT_OK
    assert len(_read_csv(out / 'sweep_read.csv')) == 4
    assert len(_read_csv(out / 'sweep_full.csv')) == 4
    vset_rows = _read_csv(out / 'vset_targets.csv')
    assert vset_rows[0] == ['R_G', 'V_SET']
    assert float(vset_rows[1][1]) == pytest.approx(0.78, rel=0.02)
    assert len(_read_csv(out / 'sweep_wer.csv')) == 4


def test_config_errors_exit_one(tmp_path):
    assert main(['gate', '--config', str(tmp_path / 'missing.toml')]) == EXIT_CONFIG
    assert main(['dance']) == EXIT_CONFIG
    assert main(['read', '--trials', '50', '--out', str(tmp_path)]) == EXIT_CONFIG
    path = _write(tmp_path / 'target.toml', '[sweep]\ntarget_wer = 0.7\n')
    assert main(['sweep', '--config', path, '--out', str(tmp_path)]) == EXIT_CONFIG


def test_numeric_failure_exits_two(tmp_path):
    path = _write(tmp_path / 'plane.toml', '[device]\nt_FL = 3e-9\n')
    assert main(['gate', '--config', path, '--out', str(tmp_path / 'out'), '--trials', N_SMALL]) == EXIT_NUMERIC


def test_unwritable_output_exits_three(tmp_path):
    blocker = tmp_path / 'file.txt'
    blocker.write_text('occupied')
    assert main(['characterize', '--out', str(blocker / 'sub')]) == EXIT_IO
