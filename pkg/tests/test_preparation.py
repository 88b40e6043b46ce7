import math

import numpy as np
import pytest

from QCatLab.errors import HalfIntegerSpin
from QCatLab.preparation import (TwistSchedule, fidelity, fit_two_component, ideal_cat_fidelity,
                                 is_symmetric_pair, prepare_symmetric_cat, prepared_bloch_vector,
                                 prepared_norm_defect, twist_evolve)
from QCatLab.spin import CoherentLabel, SpinQuantum, StateVector, cat_state, coherent_state


def test_twist_is_unitary(spin10):
    state = coherent_state(spin10, CoherentLabel(1.1, 0.4))
    assert np.allclose(twist_evolve(state, 0.0).amplitudes, state.amplitudes)
    assert twist_evolve(state, 0.7).norm() == pytest.approx(1.0)
    assert fidelity(state, state) == pytest.approx(1.0)


def test_schedule_validation():
    with pytest.raises(ValueError):
        TwistSchedule(-0.1)
    schedule = TwistSchedule(math.pi / 2.0, [(0.0, 1)])
    assert schedule.pulses == ((0.0, 1.0),)
    assert schedule.get_state() == {'chi': math.pi / 2.0, 'pulses': [[0.0, 1.0]]}


def test_fit_recovers_a_known_cat(spin10):
    label1, label2 = CoherentLabel(1.0, 0.3), CoherentLabel(2.2, 1.5)
    fit = fit_two_component(cat_state(spin10, label1, label2))
    assert fit.fidelity > 1.0 - 1e-8
    assert fit.label1.distance(label1) < 1e-4
    assert fit.label2.distance(label2) < 1e-4
    assert abs(fit.weights[0]) == pytest.approx(abs(fit.weights[1]), rel=1e-4)


def test_ideal_fidelity_of_an_exact_cat(spin10):
    label1, label2 = CoherentLabel(math.pi / 4.0), CoherentLabel(3.0 * math.pi / 4.0)
    value, alpha = ideal_cat_fidelity(cat_state(spin10, label1, label2), label1, label2)
    assert value == pytest.approx(1.0, abs=1e-9)
    assert math.cos(alpha) == pytest.approx(1.0, abs=1e-6)


def test_symmetric_pairs():
    assert is_symmetric_pair(CoherentLabel(0.5, 1.0), CoherentLabel(math.pi - 0.5, 1.0))
    assert not is_symmetric_pair(CoherentLabel(0.5, 1.0), CoherentLabel(math.pi - 0.5, 1.2))
    assert not is_symmetric_pair(CoherentLabel(0.5), CoherentLabel(2.0))


def test_preparation_gives_a_symmetric_cat(spin10):
    result = prepare_symmetric_cat(spin10)
    assert result.symmetric
    assert result.ideal_fidelity > 0.999
    assert result.fit.fidelity > 0.999
    assert prepared_norm_defect(result) < 1e-12
    assert result.fit.label1.theta == pytest.approx(math.pi / 4.0, abs=1e-4)
    assert result.get_state()['twice_j'] == 20


def test_preparation_of_the_ground_state_offset(spin10):
    result = prepare_symmetric_cat(spin10, theta_offset=math.pi / 6.0)
    assert result.symmetric
    assert result.fit.label2.theta == pytest.approx(2.0 * math.pi / 3.0, abs=1e-4)
    assert np.linalg.norm(prepared_bloch_vector(result)) <= 1.0 + 1e-12


def test_wrong_pulse_axis_breaks_the_symmetry(spin10):
    control = prepare_symmetric_cat(spin10, axis_offset=math.pi / 2.0)
    assert not control.symmetric


def test_preparation_errors():
    with pytest.raises(HalfIntegerSpin):
        prepare_symmetric_cat(SpinQuantum(21))
    with pytest.raises(ValueError):
        prepare_symmetric_cat(SpinQuantum(20), theta_offset=0.0)
    with pytest.raises(ValueError):
        prepare_symmetric_cat(SpinQuantum(20), theta_offset=math.pi / 2.0)


def test_custom_ground_state(spin10):
    ground = StateVector.basis(spin10, -20)
    assert prepare_symmetric_cat(spin10, ground=ground).symmetric
