import math

import numpy as np
import pytest

from QCatLab.dissipator import s_sum_exact
from QCatLab.errors import BoundarySaddle, DomainError, WrongRegime
from QCatLab.semiclassics import (LaplaceEngine, ReducedPoint, a0_field, action_gradient,
                                  coeff_expansion, fast_rate_coefficient, lattice_ratio,
                                  maximize_action, n_ratio_semiclassical, predict_fast,
                                  predict_slow_exp, predict_slow_poly, predict_single_coherent,
                                  quadrature_oracle, ratio_coefficients, s_derivative_coeffs,
                                  saddle_point, semiclassical_report)
from QCatLab.semiclassics.predictions import is_slow, slow_linear_coefficient
from QCatLab.spin import SpinQuantum


def test_reduced_point():
    point = ReducedPoint.from_uv(0.6, -0.6)
    assert (point.nu, point.eta) == pytest.approx((0.0, 0.6))
    assert point.w() == pytest.approx(0.64)
    assert point.boundary_distance() == pytest.approx(0.4)
    assert point.is_inside(strict=True)
    assert ReducedPoint(0.5, 0.5).is_inside()
    assert not ReducedPoint(0.5, 0.5).is_inside(strict=True)
    assert not ReducedPoint(0.8, 0.5).is_inside()


def test_saddle_of_the_slow_pair():
    saddle = saddle_point(0.5, 2.0)
    assert saddle.point.nu == pytest.approx(0.0, abs=1e-15)
    assert saddle.point.eta == pytest.approx(0.6)
    assert np.allclose(action_gradient(saddle.point, 0.5, 2.0), 0.0, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(saddle.hessian) < 0.0)
    assert saddle.det_sigma > 0.0
    assert saddle.get_state()['w0'] == pytest.approx(0.64)


@pytest.mark.parametrize('gamma1, gamma2', [(0.5, 2.0), (0.3, 0.9), (1.7, 0.4)])
def test_numerical_maximum_matches_closed_form(gamma1, gamma2):
    closed = saddle_point(gamma1, gamma2).point
    numerical = maximize_action(gamma1, gamma2)
    assert numerical.nu == pytest.approx(closed.nu, abs=1e-6)
    assert numerical.eta == pytest.approx(closed.eta, abs=1e-6)


def test_saddle_errors():
    with pytest.raises(BoundarySaddle):
        saddle_point(0.0, 2.0)
    with pytest.raises(DomainError):
        saddle_point(-1.0, 2.0)
    with pytest.raises(DomainError):
        saddle_point(0.5, math.inf)


def test_fast_rate_coefficient():
    expected = -2.0 * 0.6 ** 2 * 0.73 ** 2 / (1.09 * 1.81) ** 2
    assert fast_rate_coefficient(0.3, 0.9) == pytest.approx(expected, rel=1e-12)
    assert fast_rate_coefficient(0.5, 2.0) == 0.0
    assert fast_rate_coefficient(0.0, 2.0) == pytest.approx(-0.32)


@pytest.mark.parametrize('gamma1, gamma2', [(0.3, 0.9), (0.5, 2.0), (1.2, 0.6)])
def test_a0_at_saddle_is_the_fast_rate(gamma1, gamma2):
    point = saddle_point(gamma1, gamma2).point
    assert a0_field(point.nu, point.eta) == pytest.approx(fast_rate_coefficient(gamma1, gamma2),
                                                          abs=1e-12)
    assert coeff_expansion(point).a0 == pytest.approx(fast_rate_coefficient(gamma1, gamma2),
                                                      abs=1e-12)


def test_coefficients_need_interior_points():
    with pytest.raises(DomainError):
        coeff_expansion(ReducedPoint(0.5, 0.5))
    with pytest.raises(DomainError):
        s_derivative_coeffs(ReducedPoint(0.2, 0.3), 0.0)


def test_half_shift_rate_matches_closed_form():
    j = 10.0

    def _g(l):
        return j * (j + 1.0) - l * (l - 1.0)
    a, _ = s_derivative_coeffs(ReducedPoint(0.2, 0.3), j, half_shift=True)
    assert a == pytest.approx(-(math.sqrt(_g(5)) - math.sqrt(_g(-1))) ** 2 / (2.0 * j ** 2),
                              rel=1e-12)


def test_half_shift_coefficients_match_column_sum():
    spin = SpinQuantum(20)
    a, b = s_derivative_coeffs(ReducedPoint(0.2, 0.3), spin.j, half_shift=True)
    t = 1e-4
    first = s_sum_exact(spin, 6, 4, t / spin.j)
    second = s_sum_exact(spin, 6, 4, 2.0 * t / spin.j)
    assert (first - 1.0) / t == pytest.approx(a, rel=1e-3)
    assert (second - 2.0 * first + 1.0) / (2.0 * t ** 2) == pytest.approx(b, rel=1e-2)


def test_laplace_without_residual():
    engine = LaplaceEngine(0.5, 2.0, residual=False)
    assert engine.expand(None).orders == pytest.approx((1.0, 0.0, 0.0))

    nu0 = engine.saddle.point.nu
    orders = engine.expand(lambda nu, eta: (nu - nu0) ** 2).orders
    assert orders == pytest.approx((0.0, engine.metric[0, 0], 0.0), abs=1e-8)


def test_laplace_engine_needs_three_powers():
    with pytest.raises(ValueError):
        LaplaceEngine(0.5, 2.0, max_l=2)


def test_laplace_matches_quadrature_of_the_normalisation():
    j = 40.0
    expansion = LaplaceEngine(0.5, 2.0).expand(None)
    assert expansion.evaluate(j, scaled=True) == \
        pytest.approx(quadrature_oracle(None, 0.5, 2.0, j, scaled=True), rel=1e-3)


@pytest.mark.slow
def test_laplace_matches_quadrature_of_a_smooth_field():
    j = 40.0

    def _field(nu, eta):
        return 1.0 + nu ** 2 + 0.5 * eta

    expansion = LaplaceEngine(0.5, 2.0).expand(_field)
    assert expansion.evaluate(j, scaled=True) == \
        pytest.approx(quadrature_oracle(_field, 0.5, 2.0, j, scaled=True), rel=1e-3)


def test_quadrature_needs_large_spin():
    with pytest.raises(DomainError):
        quadrature_oracle(None, 0.5, 2.0, 3.0)


def test_lattice_average_of_a_constant():
    assert lattice_ratio(lambda nu, eta: 1.0, SpinQuantum(20), 0.5, 2.0) == pytest.approx(1.0)


def test_ratio_leading_coefficient():
    coefficients = ratio_coefficients(0.3, 0.9)
    assert coefficients.c0 == pytest.approx(fast_rate_coefficient(0.3, 0.9), rel=1e-8)
    assert coefficients.evaluate(10.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        ratio_coefficients(0.3, 0.9, density='gaussian')


def test_semiclassical_ratio_regime():
    assert n_ratio_semiclassical(0.3, 0.9, 10.0, 0.0) == 1.0
    with pytest.raises(WrongRegime):
        n_ratio_semiclassical(0.3, 0.9, 10.0, 0.05)
    with pytest.raises(ValueError):
        n_ratio_semiclassical(0.3, 0.9, 10.0, -0.01)


@pytest.mark.parametrize('gamma1', [0.4, 0.5, 0.7])
def test_slow_ratio_ignores_a2(gamma1):
    gamma2 = 1.0 / gamma1
    plain = ratio_coefficients(gamma1, gamma2)
    shifted = ratio_coefficients(gamma1, gamma2, a2=2.5)
    assert shifted.d2 == pytest.approx(plain.d2, abs=1e-8)
    for tau in (0.002, 0.005):
        assert n_ratio_semiclassical(gamma1, gamma2, 40.0, tau, a2=2.5) == pytest.approx(
            n_ratio_semiclassical(gamma1, gamma2, 40.0, tau), rel=1e-10)


def test_fast_ratio_depends_on_a2():
    plain = ratio_coefficients(0.3, 0.9)
    shifted = ratio_coefficients(0.3, 0.9, a2=2.5)
    assert (shifted.c0, shifted.d0) == (plain.c0, plain.d0)
    assert abs(shifted.d2 - plain.d2) > 1e-6


def test_closed_form_predictions():
    assert is_slow(0.5, 2.0) and is_slow(0.7, 0.7)
    assert not is_slow(0.3, 0.9)
    assert slow_linear_coefficient(0.5) == pytest.approx(0.36)

    assert predict_fast(0.3, 0.9, 10.0, 0.01) == \
        pytest.approx(math.exp(fast_rate_coefficient(0.3, 0.9) * 0.1))
    with pytest.raises(WrongRegime):
        predict_fast(0.5, 2.0, 10.0, 0.01)
    with pytest.raises(WrongRegime):
        predict_slow_poly(0.3, 0.9, 0.1)

    assert predict_slow_exp(0.5, 0.0) == 1.0
    assert predict_slow_poly(0.5, 2.0, 1e-4) == pytest.approx(predict_slow_exp(0.5, 1e-4),
                                                             abs=1e-7)
    assert predict_single_coherent(1.0, 3.0) == 1.0
    assert predict_single_coherent(2.0, 1.0) == pytest.approx(math.exp(-16.0 * 0.36))


def test_report_of_a_fast_pair():
    report = semiclassical_report(0.3, 0.9, 10.0, [0.001, 0.05])
    assert report['regime'] == 'fast'
    assert set(report) >= {'saddle', 'coefficients', 'ratio_coefficients', 'predictions'}
    assert set(report['ratio_coefficients']) == {'bare', 'stirling'}
    first, second = report['predictions']
    assert first['semiclassical'] is not None and first['slow_poly'] is None
    assert second['semiclassical'] is None
    assert second['fast'] == pytest.approx(predict_fast(0.3, 0.9, 10.0, 0.05))


def test_report_without_saddle():
    report = semiclassical_report(0.0, 2.0, 10.0, [0.01])
    assert report['saddle'] is None
    assert 'coefficients' not in report
    assert report['predictions'][0]['semiclassical'] is None
