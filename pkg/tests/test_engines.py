import logging
import math

import numpy as np
import pytest

from QCatLab.engines import (ExactEngine, OracleEngine, ShortTimeEngine, available_engines,
                             get_engine)
from QCatLab.errors import InvalidConfig
from QCatLab.norms import cat_block
from QCatLab.spin import CoherentLabel, SpinQuantum


def test_registry():
    engines = available_engines()
    assert sorted(engines) == ['exact', 'oracle', 'short-time']
    assert len({engine.code for engine in engines.values()}) == 3
    assert isinstance(get_engine('oracle', tol=1e-10), OracleEngine)
    assert isinstance(get_engine('short-time', form='matched'), ShortTimeEngine)


@pytest.mark.parametrize('make', [
    lambda: OracleEngine(tol=0.0),
    lambda: ExactEngine(method='series'),
    lambda: ShortTimeEngine(form='other'),
    lambda: get_engine('runge-kutta')
])
def test_invalid_engines(make):
    with pytest.raises(InvalidConfig):
        make()


def test_tags():
    assert OracleEngine().tag() == 'oracle(tol=1e-12)'
    assert ExactEngine().tag() == 'exact(auto)'
    assert ExactEngine('cascade', perturbation=0.001).tag() == 'exact(cascade, perturbation=0.001)'
    assert ShortTimeEngine('matched').tag() == 'short-time(matched)'
    assert str(ExactEngine()) == "<ExactEngine 'exact(auto)'>"


def test_oracle_and_exact_agree(random_density):
    rho = random_density(SpinQuantum(4))
    oracle = OracleEngine(tol=1e-13).evolve_series(rho, [0.0, 0.1, 0.7])
    exact = ExactEngine().evolve_series(rho, [0.0, 0.1, 0.7])
    for expected, actual in zip(oracle, exact):
        assert actual.max_abs_difference(expected) < 1e-9


def test_perturbation_only_after_zero_time(random_density):
    rho = random_density(SpinQuantum(4))
    faulty = ExactEngine(perturbation=1e-3)
    assert faulty.evolve(rho, 0.0).max_abs_difference(rho) < 1e-15

    clean, perturbed = ExactEngine().evolve(rho, 0.3), faulty.evolve(rho, 0.3)
    for key in clean.blocks:
        np.testing.assert_allclose(perturbed.blocks[key], 1.001 * clean.blocks[key], rtol=1e-13)


def test_polar_block_decay():
    spin = SpinQuantum(10)
    rho = cat_block(spin, CoherentLabel(0.0), CoherentLabel(math.pi))
    evolved = ExactEngine().evolve(rho, 0.4)
    assert evolved.nonzero_blocks() == [10]
    assert abs(evolved.blocks[10][0]) == pytest.approx(math.exp(-0.4) * abs(rho.blocks[10][0]))


def test_short_time_at_zero_time(random_density):
    rho = random_density(SpinQuantum(6))
    assert ShortTimeEngine().evolve(rho, 0.0).max_abs_difference(rho) == 0.0


def test_short_time_warns_outside_validity(caplog):
    spin = SpinQuantum(20)
    rho = cat_block(spin, CoherentLabel(math.pi / 3.0), CoherentLabel(2.0 * math.pi / 3.0))
    with caplog.at_level(logging.WARNING, logger='QCatLab.engines'):
        ShortTimeEngine().evolve(rho, 1.0)
    assert 'outside its validity region' in caplog.text

    caplog.clear()
    with caplog.at_level(logging.WARNING, logger='QCatLab.engines'):
        ShortTimeEngine().evolve(rho, 1e-5)
    assert caplog.text == ''
