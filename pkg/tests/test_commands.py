import csv
import json
import math

import pytest

from QCatLab.checks import CheckResult, CheckScene
from QCatLab.checks.criteria import PolarCatCheck
from QCatLab.commands import (cmd_decohere, cmd_prepare, cmd_propagator, cmd_rates,
                              cmd_semiclassics, cmd_verify, propagator_rows, verify_summary)
from QCatLab.config import RunConfig, ScanConfig
from QCatLab.errors import QuadratureFailure
from QCatLab.profiles import QuickProfile
from QCatLab.spin import SpinQuantum


def _polar_scene(fault):
    return CheckScene([PolarCatCheck()], fault)


def test_propagator_table(tmp_path):
    path = tmp_path / 'propagator.csv'
    text = cmd_propagator(2, [0.5], 0, str(path))
    assert path.read_text(encoding='utf-8') == text
    lines = text.splitlines()
    assert lines[0] == 'm,n,k,tau,value'
    assert len(lines) == 7
    assert lines[1].startswith('1,1,0,0.5,')
    assert float(lines[1].split(',')[4]) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert len(cmd_propagator(2, [0.5], output_path=str(path)).splitlines()) == 15


def test_propagator_rows_are_lower_triangular():
    rows = propagator_rows(SpinQuantum(4), [0.0, 0.2], 2)
    assert all(twice_n >= twice_m for twice_m, twice_n, _, _, _ in rows)
    at_zero = [value for twice_m, twice_n, _, tau, value in rows if tau == 0.0]
    assert sorted(at_zero) == [0.0] * 6 + [1.0] * 4


def test_decohere_writes_the_curve(tmp_path):
    path = tmp_path / 'curve.csv'
    config = RunConfig(twice_j=10, t_max=0.5, samples=6, workers=1, output_path=str(path),
                       window_end=0.5)
    curve = cmd_decohere(config)
    with open(path, newline='', encoding='utf-8') as file:
        rows = list(csv.DictReader(file))
    assert len(rows) == 6
    assert float(rows[-1]['tau']) == 0.5
    assert float(rows[-1]['n_ratio']) == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert curve.n_ratio[-1] == float(rows[-1]['n_ratio'])


def test_decohere_with_fault(tmp_path):
    config = RunConfig(twice_j=10, t_max=0.5, samples=6, workers=1,
                       output_path=str(tmp_path / 'curve.csv'))
    curve = cmd_decohere(config, perturbation=1e-3)
    assert curve.n_ratio[-1] == pytest.approx(1.001 * math.exp(-0.5), rel=1e-12)


def test_semiclassics_report(tmp_path):
    path = tmp_path / 'semiclassics.json'
    report = cmd_semiclassics(0.3, 0.9, 10.0, [0.001], str(path))
    assert report['regime'] == 'fast'
    written = json.loads(path.read_text(encoding='utf-8'))
    assert written['command'] == 'semiclassics'
    assert written['schema_version'] == 1
    assert written['predictions'][0]['tau'] == 0.001


def test_verify_summary():
    results = {'polar_cat': CheckResult('polar_cat', 'Polar', True, {}, 'ok', 0.5),
               'pointer': CheckResult('pointer', 'Pointer', False, {}, 'too far', 0.25)}
    discrepancies = [{'name': 'n1_rate_polar', 'printed': 0.0, 'alternative': -2.0,
                      'measured': -2.0, 'winner': 'alternative'},
                     {'name': 'ratio_completion', 'error': 'WrongRegime: too late'}]
    summary = verify_summary(results, discrepancies, QuickProfile())
    lines = summary.splitlines()
    assert lines[0] == 'Acceptance suite (quick profile)'
    assert lines[2].startswith('PASS  polar_cat')
    assert lines[3].startswith('FAIL  pointer') and lines[3].endswith('too far')
    assert 'measured -2 -> alternative' in summary
    assert 'error: WrongRegime: too late' in summary
    assert summary.endswith('1/2 checks passed\n')


def test_verify_passes_and_fails(monkeypatch, tmp_path):
    monkeypatch.setattr('QCatLab.commands.default_scene', _polar_scene)
    monkeypatch.setattr('QCatLab.commands.discrepancy_report', lambda **kwargs: [])
    path = tmp_path / 'verify.json'

    code, report, summary = cmd_verify(QuickProfile(), 0.0, str(path))
    assert code == 0 and report['passed']
    assert summary.endswith('1/1 checks passed\n')
    written = json.loads(path.read_text(encoding='utf-8'))
    assert written['checks'][0]['name'] == 'polar_cat'
    assert written['profile']['name'] == 'quick'

    code, report, summary = cmd_verify(QuickProfile(), 1e-3)
    assert code == 1 and not report['passed']
    assert report['fault'] == 1e-3
    assert 'FAIL  polar_cat' in summary


def test_verify_reports_discrepancy_errors(monkeypatch):
    def _broken(**kwargs):
        raise QuadratureFailure('no quadrature')
    monkeypatch.setattr('QCatLab.commands.default_scene', _polar_scene)
    monkeypatch.setattr('QCatLab.commands.discrepancy_report', _broken)
    code, report, _ = cmd_verify(QuickProfile())
    assert code == 0
    assert report['discrepancies'] == [{'name': 'discrepancy_report',
                                        'error': 'QuadratureFailure: no quadrature'}]


def test_verify_does_not_hide_programming_errors(monkeypatch):
    def _broken(**kwargs):
        raise RuntimeError('boom')
    monkeypatch.setattr('QCatLab.commands.default_scene', _polar_scene)
    monkeypatch.setattr('QCatLab.commands.discrepancy_report', _broken)
    with pytest.raises(RuntimeError):
        cmd_verify(QuickProfile())


@pytest.mark.slow
def test_rates_of_the_polar_cat(tmp_path):
    path = tmp_path / 'rates.json'
    scan = ScanConfig(twice_js=[10], pairs=[(0.0, math.inf)], window_samples=9, workers=2,
                      output_path=str(path))
    report = cmd_rates(scan)
    row, = report['rows']
    assert row['fitted_rate'] == pytest.approx(1.0, rel=1e-6)
    assert row['n1_rate_oracle'] == pytest.approx(-2.0)
    assert row['predict_fast'] is None
    written = json.loads(path.read_text(encoding='utf-8'))
    assert [entry['name'] for entry in written['discrepancies']] == sorted(
        entry['name'] for entry in written['discrepancies'])


@pytest.mark.slow
def test_prepare_report(tmp_path):
    path = tmp_path / 'prepare.json'
    report = cmd_prepare(60, output_path=str(path))
    assert report['preparation']['symmetric']
    assert report['slow_rate_check']['twice_js'] == [60, 120]
    assert all(rate > 0.0 for rate in report['slow_rate_check']['fitted_rates'])
    assert report['slow_rate_check']['passed']
    assert json.loads(path.read_text(encoding='utf-8'))['command'] == 'prepare'


@pytest.mark.slow
def test_prepare_with_wrong_axis_fails_slow_rate_check():
    report = cmd_prepare(60, axis_offset=math.pi / 2.0)
    assert not report['preparation']['symmetric']
    assert not report['slow_rate_check']['passed']
