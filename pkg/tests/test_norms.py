import math

import numpy as np
import pytest

from QCatLab.dissipator import evolve_exact
from QCatLab.engines import ExactEngine, OracleEngine
from QCatLab.errors import InsufficientSamples
from QCatLab.norms import (DecoherenceCurve, cat_block, decoherence_curve, default_window,
                           fit_initial_rate, n1_rate_closed_form, n1_rate_finite_difference,
                           n1_rate_oracle, n1_rate_printed, norm_n1, norm_n2, window_rate)
from QCatLab.spin import CoherentLabel, SpinQuantum


NORTH, SOUTH = CoherentLabel(0.0), CoherentLabel(math.pi)


def _polar_curve(taus):
    return decoherence_curve(ExactEngine(), SpinQuantum(10), NORTH, SOUTH, taus)


def test_norms_of_the_polar_cat():
    rho = cat_block(SpinQuantum(10), NORTH, SOUTH)
    assert norm_n1(rho) == pytest.approx(1.0)
    assert norm_n2(rho) == pytest.approx(1.0)


def test_polar_curve_decays_exponentially():
    taus = np.linspace(0.0, 1.0, 6)
    curve = _polar_curve(taus)
    np.testing.assert_allclose(curve.n_ratio, np.exp(-taus), rtol=1e-12)
    np.testing.assert_allclose(curve.n1, np.exp(-2.0 * taus), rtol=1e-12)
    assert curve.n_ratio[0] == 1.0
    assert curve.is_monotone()
    assert curve.meta['twice_j'] == 10
    assert curve.meta['engine'] == 'exact(auto)'


@pytest.mark.parametrize('twice_j', [2, 10, 40])
def test_polar_n1_rate(twice_j):
    assert n1_rate_oracle(SpinQuantum(twice_j), NORTH, SOUTH) == pytest.approx(-2.0, rel=1e-12)
    assert n1_rate_closed_form(0.0, math.pi, 0.0, twice_j / 2.0) == pytest.approx(-2.0)
    assert n1_rate_printed(0.0, math.pi, 0.0, twice_j / 2.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize('twice_j', [4, 9, 20])
@pytest.mark.parametrize('label1, label2', [
    (CoherentLabel(math.pi / 4.0), CoherentLabel(3.0 * math.pi / 4.0)),
    (CoherentLabel(0.0), CoherentLabel(0.0)),
    (CoherentLabel(math.pi / 2.0, 0.0), CoherentLabel(math.pi / 2.0, math.pi / 2.0)),
    (CoherentLabel(0.4, 1.0), CoherentLabel(2.1, -0.3))
])
def test_closed_form_matches_generator(twice_j, label1, label2):
    spin = SpinQuantum(twice_j)
    closed = n1_rate_closed_form(label1.theta, label2.theta, label2.phi - label1.phi, spin.j)
    assert n1_rate_oracle(spin, label1, label2) == pytest.approx(closed, rel=1e-9)


def test_closed_form_special_values():
    assert n1_rate_closed_form(math.pi / 4.0, 3.0 * math.pi / 4.0, 0.0, 7.0) == pytest.approx(-1.5)
    assert n1_rate_closed_form(math.pi / 2.0, math.pi / 2.0, math.pi / 2.0, 5.0) == \
        pytest.approx(-11.0)
    assert n1_rate_closed_form(0.0, 0.0, 0.0, 3.0) == pytest.approx(-4.0)


def test_finite_difference_matches_generator():
    spin = SpinQuantum(10)
    label1, label2 = CoherentLabel(0.7, 0.2), CoherentLabel(2.0, 1.1)
    assert n1_rate_finite_difference(spin, label1, label2) == \
        pytest.approx(n1_rate_oracle(spin, label1, label2), rel=1e-6)


def test_curve_validation():
    with pytest.raises(ValueError):
        DecoherenceCurve(np.array([0.0, 0.2, 0.1]), np.ones(3), np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        DecoherenceCurve(np.array([0.0, 0.1]), np.ones(3), np.ones(2), np.ones(2))
    with pytest.raises(ValueError):
        _polar_curve([0.1, 0.2])


def test_curve_is_read_only():
    curve = _polar_curve([0.0, 0.1])
    with pytest.raises(ValueError):
        curve.n_ratio[0] = 2.0


def test_curve_state():
    state = _polar_curve([0.0, 0.5]).get_state()
    assert state['taus'] == [0.0, 0.5]
    assert state['n_ratio'][1] == pytest.approx(math.exp(-0.5))
    assert state['meta']['label2'] == SOUTH.get_state()


def test_monotonicity():
    taus = np.array([0.0, 0.1, 0.2])
    increasing = DecoherenceCurve(taus, np.ones(3), np.ones(3), np.array([1.0, 0.9, 0.95]))
    assert not increasing.is_monotone()
    assert increasing.is_monotone(slack=0.1)


def test_fit_recovers_polar_rate():
    curve = _polar_curve(np.linspace(0.0, 0.5, 51))
    assert fit_initial_rate(curve, 0.1) == pytest.approx(1.0, rel=1e-8)
    assert fit_initial_rate(curve, 0.1, degree=1) == pytest.approx(1.0, rel=1e-8)
    assert default_window(curve) == pytest.approx(0.05)
    assert fit_initial_rate(curve) == pytest.approx(1.0, rel=1e-8)


def test_default_fit_is_the_least_squares_slope():
    taus = np.linspace(0.0, 0.1, 11)
    ratios = np.exp(-2.0 * taus - 5.0 * taus ** 2)
    curve = DecoherenceCurve(taus, np.ones(11), np.ones(11), ratios)
    slope = np.polyfit(taus, np.log(ratios), 1)[0]
    assert fit_initial_rate(curve, 0.1) == pytest.approx(-slope, rel=1e-10)
    assert fit_initial_rate(curve, 0.1) == pytest.approx(2.5, rel=1e-10)
    assert fit_initial_rate(curve, 0.1, degree=2) == pytest.approx(2.0, rel=1e-10)


def test_window_rate_of_the_polar_cat():
    assert window_rate(ExactEngine(), SpinQuantum(10), NORTH, SOUTH) == pytest.approx(
        1.0, rel=1e-8)
    assert window_rate(ExactEngine(), SpinQuantum(40), NORTH, SOUTH, 0.1, 6) == pytest.approx(
        1.0, rel=1e-8)


def test_fit_errors():
    curve = _polar_curve(np.linspace(0.0, 1.0, 11))
    with pytest.raises(InsufficientSamples):
        fit_initial_rate(curve, 0.1)
    with pytest.raises(ValueError):
        fit_initial_rate(curve, 1.0, degree=0)

    taus = np.linspace(0.0, 0.5, 6)
    vanishing = DecoherenceCurve(taus, np.ones(6), np.ones(6), np.array([1, 0.5, 0, 0, 0, 0.0]))
    with pytest.raises(InsufficientSamples):
        fit_initial_rate(vanishing, 0.5)


def test_oracle_curve_matches_exact_curve():
    spin = SpinQuantum(8)
    label1, label2 = CoherentLabel(0.6), CoherentLabel(2.2, 0.4)
    taus = np.linspace(0.0, 0.2, 5)
    oracle = decoherence_curve(OracleEngine(tol=1e-12), spin, label1, label2, taus)
    exact = decoherence_curve(ExactEngine(), spin, label1, label2, taus)
    np.testing.assert_allclose(oracle.n_ratio, exact.n_ratio, rtol=1e-8)


@pytest.mark.slow
def test_slow_cat_rate_stays_finite():
    spin = SpinQuantum(60)
    label1, label2 = CoherentLabel.from_gamma(0.5), CoherentLabel.from_gamma(2.0)
    curve = decoherence_curve(ExactEngine(), spin, label1, label2, np.linspace(0.0, 0.05, 51))
    assert fit_initial_rate(curve, 0.05, degree=2) == pytest.approx(0.36, rel=0.15)


@pytest.mark.parametrize('theta1, theta2', [(0.3, 2.5), (math.pi / 4.0, 3.0 * math.pi / 4.0),
                                            (1.2, 1.9), (0.0, 2.2)])
def test_real_cat_block_stays_real_and_non_negative(theta1, theta2):
    rho0 = cat_block(SpinQuantum(16), CoherentLabel(theta1), CoherentLabel(theta2))
    for block in rho0.blocks.values():
        assert np.all(np.real(block) >= 0.0)
    for tau in (0.05, 0.5, 2.0):
        rho = evolve_exact(rho0, tau)
        for block in rho.blocks.values():
            assert np.all(np.abs(np.imag(block)) <= 1e-12)
            assert np.all(np.real(block) >= -1e-10)


@pytest.mark.parametrize('label1, label2', [
    (CoherentLabel(0.3, 0.4), CoherentLabel(2.5, 1.9)),
    (CoherentLabel(1.0), CoherentLabel(1.0, math.pi / 2.0)),
    (CoherentLabel(math.pi / 2.0), CoherentLabel(math.pi / 2.0, math.pi)),
    (NORTH, CoherentLabel(2.0, 3.0))
])
def test_n2_never_increases(label1, label2):
    curve = decoherence_curve(ExactEngine(), SpinQuantum(12), label1, label2,
                              np.linspace(0.0, 1.0, 21))
    assert np.all(np.diff(curve.n2) <= 1e-10 * curve.n2[0])
