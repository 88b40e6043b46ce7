import math

import pytest

from QCatLab.checks import Check, CheckScene, default_scene
from QCatLab.checks.criteria import (FastDecayCheck, InitialRateCheck, LaplaceCheck, PointerCheck,
                                    PolarCatCheck, PreparationCheck, SemiclassicalCheck,
                                    SlowDecayCheck)
from QCatLab.errors import CycleError
from QCatLab.profiles import FullProfile, QuickProfile
from QCatLab.spin import CoherentLabel


class _Constant(Check):
    code = 100
    name = 'constant'
    title = 'Always passes'

    def evaluate(self, profile, inputs):
        self.measure('value', 1.0)
        self.require(True, 'never shown')


class _Failing(Check):
    code = 101
    name = 'failing'

    def evaluate(self, profile, inputs):
        self.require(False, 'always fails')


class _Dependent(Check):
    code = 102
    name = 'dependent'
    depends = ('failing', 'constant')

    def evaluate(self, profile, inputs):
        self.measure('inputs', sorted(inputs))


class _Raising(Check):
    code = 103
    name = 'raising'

    def evaluate(self, profile, inputs):
        raise RuntimeError('boom')


class _CycleA(Check):
    code = 104
    name = 'cycle_a'
    depends = ('cycle_b',)

    def evaluate(self, profile, inputs):
        pass


class _CycleB(Check):
    code = 105
    name = 'cycle_b'
    depends = ('cycle_a',)

    def evaluate(self, profile, inputs):
        pass


def test_duplicate_checks_are_rejected():
    scene = CheckScene([_Constant()])
    with pytest.raises(ValueError):
        scene.add_check(_Constant())

    class _SameCode(_Failing):
        code = 100
    with pytest.raises(ValueError):
        scene.add_check(_SameCode())
    assert len(scene.checks) == 1


def test_get_check():
    scene = CheckScene([_Constant(), _Failing()])
    assert scene.get_check('failing').code == 101
    assert scene.get_check('constant').scene is scene
    with pytest.raises(ValueError):
        scene.get_check('missing')


def test_dependencies_come_first():
    scene = CheckScene([_Dependent(), _Failing(), _Constant()])
    assert [check.name for check in scene.order()] == ['constant', 'failing', 'dependent']
    assert not scene.has_cycles()


def test_cycles_are_rejected():
    scene = CheckScene([_CycleA(), _CycleB()])
    assert scene.has_cycles()
    with pytest.raises(CycleError):
        scene.order()
    with pytest.raises(CycleError):
        scene.evaluate(QuickProfile())


def test_unknown_dependency():
    with pytest.raises(ValueError):
        CheckScene([_Dependent()]).digraph()


def test_failed_dependency_fails_dependent():
    results = CheckScene([_Dependent(), _Failing(), _Constant()]).evaluate(QuickProfile())
    assert list(results) == ['constant', 'failing', 'dependent']
    assert results['constant'].passed and results['constant'].message == 'ok'
    assert results['constant'].measured == {'value': 1.0}
    assert results['failing'].message == 'always fails'
    assert not results['dependent'].passed
    assert results['dependent'].message == 'Dependencies failed: failing'
    assert results['dependent'].measured == {}


def test_exception_is_recorded():
    results = CheckScene([_Raising(), _Constant()]).evaluate(QuickProfile())
    assert not results['raising'].passed
    assert results['raising'].message == 'RuntimeError: boom'
    assert results['constant'].passed


def test_result_is_cached_until_reset():
    check = _Constant()
    assert check.result is None
    first = check.run(QuickProfile(), {})
    assert check.run(QuickProfile(), {}) is first
    assert check.result is first
    check.reset()
    assert check.result is None
    assert 'elapsed' not in first.get_state()


def test_polar_cat_check():
    results = CheckScene([PolarCatCheck()]).evaluate(QuickProfile())
    assert results['polar_cat'].passed, results['polar_cat'].message
    assert set(results['polar_cat'].measured) == {'oracle_2', 'oracle_10', 'exact_2', 'exact_10'}


def test_injected_fault_fails_polar_cat_check():
    scene = CheckScene([PolarCatCheck()], fault=1e-3)
    assert scene.exact_engine().perturbation == 1e-3
    result = scene.evaluate(QuickProfile())['polar_cat']
    assert not result.passed
    assert 'exact engine' in result.message
    assert result.measured['oracle_10'] < 1e-8


def test_pointer_check():
    result = CheckScene([PointerCheck()]).evaluate(FullProfile())['pointer']
    assert result.passed, result.message
    assert len(result.measured['deviations']) == 3


def test_initial_rate_check():
    result = CheckScene([InitialRateCheck()]).evaluate(QuickProfile())['initial_rate']
    assert result.passed, result.message
    assert all(rate < 0.0 for rate in result.measured['symmetric_rates'])
    assert result.measured['symmetric_factor'] < QuickProfile().symmetric_factor


def test_initial_rate_check_rejects_growing_rates():
    class _Accelerated(InitialRateCheck):
        symmetric_labels = (CoherentLabel(math.pi / 2.0),
                            CoherentLabel(math.pi / 2.0, math.pi / 2.0))

    result = CheckScene([_Accelerated()]).evaluate(QuickProfile())['initial_rate']
    assert not result.passed
    assert 'symmetric cat rates vary' in result.message
    assert result.measured['symmetric_factor'] > 3.0


@pytest.mark.slow
def test_fast_decay_check():
    result = CheckScene([FastDecayCheck()]).evaluate(FullProfile())['fast_decay']
    assert result.passed, result.message
    assert result.measured['ratio'] == pytest.approx(2.0, abs=0.2)


@pytest.mark.slow
def test_slow_decay_check():
    result = CheckScene([SlowDecayCheck()]).evaluate(FullProfile())['slow_decay']
    assert result.passed, result.message
    assert result.measured['spread'] < FullProfile().slow_spread


@pytest.mark.slow
def test_laplace_and_semiclassical_checks():
    results = CheckScene([SemiclassicalCheck(), LaplaceCheck()]).evaluate(FullProfile())
    assert list(results) == ['laplace', 'semiclassical']
    assert results['laplace'].passed, results['laplace'].message
    assert results['semiclassical'].passed, results['semiclassical'].message


@pytest.mark.slow
def test_preparation_check():
    profile = FullProfile()
    result = CheckScene([PreparationCheck()]).evaluate(profile)['preparation']
    assert result.passed, result.message
    assert len(result.measured['prepared_rates']) == len(profile.slow_twice_js)
    assert result.measured['prepared_spread'] < profile.slow_spread
    assert result.measured['control_spread'] >= profile.slow_spread


def test_default_scene():
    scene = default_scene()
    assert len(scene.checks) == 10
    assert [check.code for check in scene.order()] == list(range(1, 11))
    assert scene.get_check('semiclassical').depends == ('laplace',)
    assert default_scene(1e-3).fault == 1e-3
