import csv
import json
import math

import pytest

from QCatLab.checks import CheckScene
from QCatLab.checks.criteria import PolarCatCheck
from QCatLab.cli import build_parser, main


def _read_csv(path):
    with open(path, newline='', encoding='utf-8') as file:
        return list(csv.DictReader(file))


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(['--version'])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith('qcatlab ')


def test_subcommand_is_required():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([])
    assert info.value.code == 2


def test_propagator_to_stdout(capsys):
    assert main(['propagator', '--twice-j', '2', '--tau', '0.5', '--twice-k', '0']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'm,n,k,tau,value'
    assert len(lines) == 7


def test_decohere_to_file(tmp_path):
    path = tmp_path / 'curve.csv'
    assert main(['decohere', '--twice-j', '10', '--t-max', '0.5', '--samples', '6',
                 '--output', str(path)]) == 0
    rows = _read_csv(path)
    assert len(rows) == 6
    assert float(rows[-1]['n_ratio']) == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_decohere_in_seconds(tmp_path):
    path = tmp_path / 'curve.csv'
    assert main(['decohere', '--twice-j', '20', '--t-max-seconds', '1e-6', '--samples', '3',
                 '--output', str(path)]) == 0
    assert float(_read_csv(path)[-1]['tau']) == pytest.approx(2e-6)


def test_decohere_from_config_file(tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'twice_j': 10, 'samples': 3,
                                  'label1': {'gamma': 0.0}, 'label2': {'gamma': 'inf'},
                                  'units': {'kappa': 1e8}}), encoding='utf-8')
    path = tmp_path / 'curve.csv'
    assert main(['--config', str(config), 'decohere', '--t-max-seconds', '1e-4',
                 '--output', str(path)]) == 0
    rows = _read_csv(path)
    assert len(rows) == 3
    assert float(rows[-1]['tau']) == pytest.approx(1e-5)
    assert float(rows[-1]['n_ratio']) == pytest.approx(math.exp(-1e-5), rel=1e-10)


def test_flags_override_config_file(tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'twice_j': 10, 'samples': 3}), encoding='utf-8')
    path = tmp_path / 'curve.csv'
    assert main(['--config', str(config), 'decohere', '--samples', '5', '--t-max', '0.2',
                 '--output', str(path)]) == 0
    assert len(_read_csv(path)) == 5


@pytest.mark.parametrize('argv', [
    ['decohere', '--engine', 'euler'],
    ['decohere', '--gamma1', '0.5', '--theta1', '30'],
    ['decohere', '--phi1', '30'],
    ['decohere', '--samples', '1'],
    ['propagator', '--twice-j', '2', '--tau', '-1'],
    ['propagator', '--twice-j', '2', '--tau', '0.5', '--twice-k', '3'],
    ['semiclassics', '--gamma1', '-1', '--gamma2', '2', '--j', '10']
])
def test_invalid_input_exits_with_two(capsys, argv):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith('qcatlab: error:')


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'spin': 3}), encoding='utf-8')
    assert main(['--config', str(config), 'decohere']) == 2
    assert 'spin' in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(['--config', str(tmp_path / 'missing.json'), 'decohere']) == 2
    assert capsys.readouterr().err.startswith('qcatlab: error:')


def test_semiclassics_to_file(tmp_path):
    path = tmp_path / 'semiclassics.json'
    assert main(['semiclassics', '--gamma1', '0.5', '--gamma2', '2', '--j', '10',
                 '--output', str(path)]) == 0
    report = json.loads(path.read_text(encoding='utf-8'))
    assert report['regime'] == 'slow'
    assert [entry['tau'] for entry in report['predictions']] == [0.001, 0.002, 0.005]


def test_verify_with_fault(monkeypatch, capsys):
    monkeypatch.setattr('QCatLab.commands.default_scene',
                        lambda fault: CheckScene([PolarCatCheck()], fault))
    monkeypatch.setattr('QCatLab.commands.discrepancy_report', lambda **kwargs: [])
    assert main(['verify', '--profile', 'quick']) == 0
    assert 'PASS  polar_cat' in capsys.readouterr().out
    assert main(['verify', '--profile', 'quick', '--inject-fault']) == 1
    assert 'FAIL  polar_cat' in capsys.readouterr().out


def test_verify_reads_profile_section(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr('QCatLab.commands.default_scene',
                        lambda fault: CheckScene([PolarCatCheck()], fault))
    monkeypatch.setattr('QCatLab.commands.discrepancy_report', lambda **kwargs: [])
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'profile': {'polar_twice_js': [4]}}), encoding='utf-8')
    path = tmp_path / 'verify.json'
    assert main(['--config', str(config), 'verify', '--profile', 'quick',
                 '--output', str(path)]) == 0
    report = json.loads(path.read_text(encoding='utf-8'))
    assert report['profile']['polar_twice_js'] == [4]
    assert set(report['checks'][0]['measured']) == {'oracle_4', 'exact_4'}
    capsys.readouterr()


@pytest.mark.slow
def test_prepare_to_file(tmp_path):
    path = tmp_path / 'prepare.json'
    assert main(['prepare', '--twice-j', '10', '--output', str(path)]) == 0
    assert json.loads(path.read_text(encoding='utf-8'))['preparation']['symmetric']
