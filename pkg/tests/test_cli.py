import csv
import math
import logging
import argparse

import pytest
import xarray as xr

from gascatter import __version__
from gascatter.app import main
from gascatter.cli import free_range, locked_value, parse_arguments, scan_spec, tie_spec
from gascatter.core.loader import PRESETS


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command from an empty directory (no gascatter.toml)."""
    monkeypatch.chdir(tmp_path)
    yield tmp_path
    # drop the stderr handler installed by main(); its stream belonged to capsys
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)


def data_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith('#')]
    return list(csv.DictReader(lines))


def manifest(text):
    entries = {}
    for line in text.splitlines():
        if line.startswith('# '):
            key, _, value = line[2:].partition(': ')
            entries[key] = value
    return entries


def run(capsys, *argv):
    code = main(['-q', *argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestSpectrum:

    def test_negative_channel_lock_transmits_everything(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--figure', 'fig1g', '--points', '201')
        assert code == 0

        rows = data_rows(out)
        assert len(rows) == 201
        assert list(rows[0]) == ['delta_over_gamma', 'T', 'R', 'Tc', 'T_b', 'R_b', 'Tc_b', 'I1', 'I2']
        assert min(float(row['T']) for row in rows) >= 1 - 1e-12
        assert float(rows[0]['delta_over_gamma']) == -10.0

        header = manifest(out)
        assert header['tool'] == f"gascatter {__version__}"
        assert header['command'] == 'spectrum'
        assert header['figure'] == 'fig1g'
        assert header['regime'] == 'markov'
        assert header['grid.points'] == '201'
        assert len(header['input_sha256']) == 64

    def test_identical_inputs_give_identical_bytes(self, capsys, workdir):
        argv = ['spectrum', '--figure', 'fig4c', '--points', '301']
        assert run(capsys, *argv, '-o', 'first.csv')[0] == 0
        assert run(capsys, *argv, '-o', 'second.csv')[0] == 0
        assert (workdir / 'first.csv').read_bytes() == (workdir / 'second.csv').read_bytes()

    def test_flags_override_the_preset(self, capsys):
        _, out, _ = run(capsys, 'spectrum', '--figure', 'fig1g', '--phi-minus', '0.5',
                        '--delta-min', '-1', '--delta-max', '1', '--points', '5')
        rows = data_rows(out)
        assert [float(r['delta_over_gamma']) for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]
        assert manifest(out)['config.phi_minus'] == format(0.5 * math.pi, '.17g')
        assert min(float(r['T']) for r in rows) < 1 - 1e-3

    def test_netcdf_output(self, capsys, workdir):
        path = workdir / 'fig5b.nc'
        code, _, _ = run(capsys, 'spectrum', '--figure', 'fig5b', '--points', '101',
                         '-o', 'fig5b.csv', '--netcdf', str(path))
        assert code == 0
        with xr.open_dataset(path) as ds:
            assert ds.attrs['command'] == 'spectrum'
            assert ds.attrs['figure'] == 'fig5b'
            assert ds['I2'].sizes['delta_over_gamma'] == 101
            assert float(ds['I2'].max()) == pytest.approx(1.0, abs=1e-9)


class TestContrast:

    def test_even_contrast_reaches_one(self, capsys):
        code, out, _ = run(capsys, 'contrast', '--figure', 'fig5b')
        assert code == 0
        rows = data_rows(out)
        assert list(rows[0]) == ['delta_over_gamma', 'Tc', 'Tc_b', 'I1', 'I2']
        assert max(float(r['I2']) for r in rows) == pytest.approx(1.0, abs=1e-9)

    def test_scan_columns(self, capsys):
        code, out, _ = run(capsys, 'contrast', '--figure', 'fig5a', '--points', '41',
                           '--scan', 'phi-plus=0,0.5')
        assert code == 0
        rows = data_rows(out)
        assert list(rows[0]) == ['delta_over_gamma', 'I2@phi_plus=0', 'I2@phi_plus=0.5']
        for row in rows:
            assert float(row['I2@phi_plus=0']) == pytest.approx(float(row['I2@phi_plus=0.5']), abs=1e-10)
        assert manifest(out)['option.scan'] == 'phi_plus'

    def test_bad_scan_parameter(self, capsys):
        code, _, err = run(capsys, 'contrast', '--scan', 'delta=0,1')
        assert code == 2
        assert "cannot scan" in err


class TestBic:

    def test_positive_channel_report(self, capsys):
        code, out, _ = run(capsys, 'bic', '--figure', 'fig1a')
        assert code == 0
        lines = [line for line in out.splitlines() if not line.startswith('#')]
        assert lines[0] == "positive-channel BIC: Tc≡0; R=1 at Δ=−Γ_−sinφ_−"
        assert lines[1] == "  lock: phi_J = pi, phi_+ = 0 (mod 2pi)"
        assert lines[2].startswith("  total reflection at Delta/Gamma = -0.3535533905")

    def test_no_lock(self, capsys):
        _, out, _ = run(capsys, 'bic', '--figure', 'fig1d')
        assert "no BIC lock satisfied" in out

    def test_retarded_suppression_points(self, capsys):
        _, out, _ = run(capsys, 'bic', '--figure', 'fig4c')
        suppressed = [line for line in out.splitlines() if 'emission suppressed' in line]
        assert len(suppressed) == 2
        assert suppressed[0].startswith("plus-channel emission suppressed at Delta/Gamma = ")
        assert ", 0, 2" in suppressed[1]


class TestOptimize:

    def test_reciprocal_conversion_bound(self, capsys):
        code, out, err = run(capsys, 'optimize', '--regime', 'markov', '--phi-minus', '0.5',
                             '--lock', 'phi-J=0', '--free', 'phi-plus=0:2', '--free', 'delta=-5:5',
                             '--resolution', '24')
        assert code == 0
        rows = data_rows(out)
        assert float(rows[0]['value']) == pytest.approx(0.5, abs=1e-6)
        assert float(rows[0]['phi_J']) == 0.0
        assert "objective: Tc (markov regime)" in err
        assert manifest(out)['option.resolution'] == '24'

    def test_tie_with_offset(self, capsys):
        code, out, err = run(capsys, 'optimize', '--regime', 'markov', '--objective', 'absI2',
                             '--lock', 'phi-J=0.3', '--tie', 'phi-minus=phi-J+1',
                             '--free', 'phi-plus=0:2', '--free', 'delta=-5:5', '--resolution', '16')
        assert code == 0
        row = data_rows(out)[0]
        assert float(row['value']) == pytest.approx(1.0, abs=1e-6)
        assert float(row['phi_minus']) == pytest.approx(1.3)

    @pytest.mark.parametrize("argv", [
        ['optimize', '--free', 'delta=1:1'],
        ['optimize', '--free', 'delta'],
        ['optimize', '--lock', 'omega=1'],
        ['optimize', '--free', 'delta=-1:1', '--lock', 'delta=0'],
    ])
    def test_invalid_search_box(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == 2


class TestVerify:

    def test_campaign_is_deterministic(self, capsys):
        first = run(capsys, 'verify', '--points', '100')
        second = run(capsys, 'verify', '--points', '100')
        assert first[0] == second[0] == 0
        assert first[1] == second[1]
        assert first[1].rstrip().endswith("result: PASS")

    def test_tolerance_breach(self, capsys):
        code, out, err = run(capsys, 'verify', '--points', '50', '--tolerance', '1e-30')
        assert code == 4
        assert out.rstrip().endswith("result: FAIL")
        assert "exceeds tolerance" in err

    def test_invalid_campaign(self, capsys):
        assert run(capsys, 'verify', '--points', '0')[0] == 2
        assert run(capsys, 'verify', '--tau-gamma', '-1')[0] == 2


class TestExitCodes:

    def test_empty_grid(self, capsys):
        code, _, err = run(capsys, 'spectrum', '--points', '0')
        assert code == 2
        assert err.startswith("gascatter: error:")

    def test_unknown_figure(self, capsys):
        code, _, err = run(capsys, 'spectrum', '--figure', 'fig9')
        assert code == 2
        assert "unknown figure 'fig9'" in err

    def test_closed_channel(self, capsys):
        code, _, err = run(capsys, 'spectrum', '--figure', 'fig4a',
                           '--delta-min', '-700', '--delta-max', '-690', '--points', '11')
        assert code == 3
        assert "closed" in err

    def test_missing_command(self, capsys):
        assert run(capsys)[0] == 2

    def test_usage_error(self, capsys):
        assert run(capsys, 'spectrum', '--regime', 'retarded')[0] == 2


class TestInformation:

    def test_list_figures(self, capsys):
        code, out, _ = run(capsys, '--list-figures')
        assert code == 0
        assert [line.split(':')[0] for line in out.splitlines()] == list(PRESETS)

    def test_list_figures_after_subcommand(self, capsys):
        code, out, _ = run(capsys, 'spectrum', '--list-figures')
        assert code == 0
        assert len(out.splitlines()) == len(PRESETS)

    def test_version(self, capsys):
        code, out, _ = run(capsys, '--version')
        assert code == 0
        assert out.strip() == f"gascatter {__version__}"

    def test_verbose_run_reports_evaluation_metrics(self, capsys):
        code = main(['-v', 'spectrum', '--figure', 'fig1g', '--points', '11'])
        _, err = capsys.readouterr()
        assert code == 0
        assert "Evaluation Metrics" in err

    def test_quiet_run_hides_evaluation_metrics(self, capsys):
        code, _, err = run(capsys, 'spectrum', '--figure', 'fig1g', '--points', '11')
        assert code == 0
        assert "Evaluation Metrics" not in err


class TestArgumentTypes:

    @pytest.mark.parametrize("text, expected", [
        ("phi-minus=phi-J+1", ('phi_minus', 'phi_J', 1.0)),
        ("phi_minus=phi_J", ('phi_minus', 'phi_J', 0.0)),
        ("phi-plus=phi-minus-0.5", ('phi_plus', 'phi_minus', -0.5)),
        ("delta=tau-gamma+1e-3", ('delta', 'tau_gamma', 1e-3)),
        ("theta = phi-J - 2.5E-1", ('theta', 'phi_J', -0.25)),
    ])
    def test_tie(self, text, expected):
        assert tie_spec(text) == expected

    @pytest.mark.parametrize("text", ["phi-plus", "phi-plus=", "phi-plus=phi-J*2", "phi-plus=omega+1"])
    def test_bad_tie(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            tie_spec(text)

    def test_ranges_and_locks(self):
        assert free_range("phi-J=0:2") == ('phi_J', 0.0, 2.0)
        assert free_range("delta=-5:5") == ('delta', -5.0, 5.0)
        assert locked_value("tau-gamma=3.5") == ('tau_gamma', 3.5)
        with pytest.raises(argparse.ArgumentTypeError):
            free_range("delta=-5")
        with pytest.raises(argparse.ArgumentTypeError):
            locked_value("phi-J=half")

    def test_parse_arguments(self):
        args = parse_arguments(['bic', '--figure', 'fig1a', '-q'])
        assert (args.command, args.figure, args.quiet) == ('bic', 'fig1a', True)
        assert args.list_figures is False

    def test_scan(self):
        assert scan_spec("tau-gamma=1, 2,3") == ('tau_gamma', ['1', '2', '3'])
        with pytest.raises(argparse.ArgumentTypeError):
            scan_spec("phi-J=")
