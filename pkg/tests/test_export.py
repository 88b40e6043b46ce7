import json
import math

import numpy as np
import pytest

from QCatLab.export import (curve_csv, format_float, format_twice, json_safe, propagator_csv,
                            report_json, sanitize_floats, write_text)
from QCatLab.norms import DecoherenceCurve


def test_float_format_round_trips():
    for value in (0.1, 1.0 / 3.0, math.exp(-0.11), 1e-300):
        assert float(format_float(value)) == value
    assert format_float(1.0) == '1'
    assert format_float(np.float64(0.25)) == '0.25'


@pytest.mark.parametrize('twice_value, expected', [(4, '2'), (0, '0'), (3, '3/2'), (-5, '-5/2'),
                                                   (-2, '-1')])
def test_twice_format(twice_value, expected):
    assert format_twice(twice_value) == expected


def test_curve_csv():
    curve = DecoherenceCurve(np.array([0.0, 0.5]), np.array([1.0, 0.25]), np.array([2.0, 1.0]),
                             np.array([1.0, 0.5]))
    assert curve_csv(curve) == 'tau,n1,n2,n_ratio\n0,1,2,1\n0.5,0.25,1,0.5\n'


def test_propagator_csv():
    text = propagator_csv([(1, 3, -2, 0.5, 0.125)])
    assert text == 'm,n,k,tau,value\n1/2,3/2,-1,0.5,0.125\n'


def test_json_conversion():
    converted = json_safe({'a': np.arange(3), 'b': (np.float64(0.5), np.int64(2)), 'c': 1 + 2j,
                           'd': np.bool_(True), 3: None})
    assert converted == {'a': [0, 1, 2], 'b': [0.5, 2], 'c': [1.0, 2.0], 'd': True, '3': None}
    assert isinstance(converted['b'][1], int)


def test_report_json_is_deterministic():
    text = report_json({'z': 1, 'a': [0.1, 2]})
    assert text.endswith('\n')
    assert list(json.loads(text)) == ['a', 'schema_version', 'z']
    assert json.loads(text)['schema_version'] == 1
    assert report_json({'a': [0.1, 2], 'z': 1}) == text


def test_report_json_rejects_nan():
    with pytest.raises(ValueError):
        report_json({'rate': math.nan})
    assert json.loads(report_json(sanitize_floats({'rate': math.nan, 'rows': [(math.inf, 1.0)]}))) \
        == {'rate': 'nan', 'rows': [['inf', 1.0]], 'schema_version': 1}


def test_write_text(tmp_path, capsys):
    write_text('a,b\n')
    assert capsys.readouterr().out == 'a,b\n'

    path = tmp_path / 'out.csv'
    write_text('a,b\n1,2\n', str(path))
    assert path.read_text(encoding='utf-8') == 'a,b\n1,2\n'
    assert capsys.readouterr().out == ''
