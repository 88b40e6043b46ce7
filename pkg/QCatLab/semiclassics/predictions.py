"""Closed-form decoherence predictions and the semiclassical summary report"""
import logging
import math
from typing import Sequence

from QCatLab.errors import BoundarySaddle, WrongRegime
from QCatLab.semiclassics.action import check_gamma, saddle_point
from QCatLab.semiclassics.coefficients import coeff_expansion
from QCatLab.semiclassics.laplace import EXPANSION_REGIME, n_ratio_semiclassical, ratio_coefficients


logger = logging.getLogger(__name__)

REGIME_TOLERANCE = 1e-10
"""float: Tolerance of the conditions gamma1 = gamma2 and gamma1 gamma2 = 1"""


def fast_rate_coefficient(gamma1: float, gamma2: float) -> float:
    """
    Coefficient -2 (gamma1 - gamma2)^2 (1 - gamma1 gamma2)^2 / ((1 + gamma1^2)(1 + gamma2^2))^2.

    This is a0 at the maximum of the action; the fast decay is exp(coefficient j tau).

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label

    Returns
    -------
    float
        Rate coefficient (non-positive)
    """
    gamma1 = check_gamma(gamma1, allow_zero=True)
    gamma2 = check_gamma(gamma2, allow_zero=True)
    return (-2.0 * (gamma1 - gamma2) ** 2 * (1.0 - gamma1 * gamma2) ** 2
            / ((1.0 + gamma1 ** 2) * (1.0 + gamma2 ** 2)) ** 2)


def slow_linear_coefficient(gamma1: float) -> float:
    """Linear rate ((gamma1^2 - 1)/(gamma1^2 + 1))^2 of the slow decay"""
    gamma1 = check_gamma(gamma1, allow_zero=True)
    return ((gamma1 ** 2 - 1.0) / (gamma1 ** 2 + 1.0)) ** 2


def slow_quadratic_coefficient(gamma1: float) -> float:
    """Quadratic coefficient (3g^8 - 3g^6 + 4g^4 - 3g^2 + 3) / (2 (g^2 + 1)^4) of the slow decay"""
    g2 = check_gamma(gamma1, allow_zero=True) ** 2
    return (3.0 * g2 ** 4 - 3.0 * g2 ** 3 + 4.0 * g2 ** 2 - 3.0 * g2 + 3.0) / (2.0 * (g2 + 1.0) ** 4)


def predict_fast(gamma1: float, gamma2: float, j: float, tau: float) -> float:
    """
    Accelerated decay of the coherences, n = exp(coefficient j tau).

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label
    j : float
        Spin quantum number
    tau : float
        Dimensionless time

    Returns
    -------
    float
        n(tau)

    Raises
    ------
    WrongRegime
        If gamma1 = gamma2 or gamma1 gamma2 = 1, where the leading rate vanishes
    """
    if abs(gamma1 - gamma2) < REGIME_TOLERANCE or abs(gamma1 * gamma2 - 1.0) < REGIME_TOLERANCE:
        raise WrongRegime(f"Labels ({gamma1}, {gamma2}) decay slowly; use the slow predictions")
    return math.exp(fast_rate_coefficient(gamma1, gamma2) * j * tau)


def predict_slow_exp(gamma1: float, tau: float) -> float:
    """
    Slow decay of a cat with gamma2 = 1/gamma1 in exponential form (independent of j).

    n = exp(-((g^2 - 1)/(g^2 + 1))^2 tau - (3g^8 - 3g^6 + 4g^4 - 3g^2 + 3)/(2(g^2 + 1)^4) tau^2)

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    tau : float
        Dimensionless time

    Returns
    -------
    float
        n(tau)
    """
    return math.exp(-slow_linear_coefficient(gamma1) * tau
                    - slow_quadratic_coefficient(gamma1) * tau ** 2)


def predict_slow_poly(gamma1: float, gamma2: float, tau: float) -> float:
    """
    Slow decay in polynomial form, 1 - eta0^2 tau - (7 eta0^2 + 1) tau^2 / 4.

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label (gamma1 gamma2 = 1)
    tau : float
        Dimensionless time

    Returns
    -------
    float
        n(tau)

    Raises
    ------
    WrongRegime
        If gamma1 gamma2 differs from 1
    """
    if abs(gamma1 * gamma2 - 1.0) > REGIME_TOLERANCE:
        raise WrongRegime(f"Polynomial slow form needs gamma1 gamma2 = 1, got {gamma1 * gamma2:g}")
    eta0_squared = ((gamma2 ** 2 - gamma1 ** 2) / ((1.0 + gamma1 ** 2) * (1.0 + gamma2 ** 2))) ** 2
    return 1.0 - slow_linear_coefficient(gamma1) * tau - 0.25 * (7.0 * eta0_squared + 1.0) * tau ** 2


def predict_single_coherent(gamma: float, tau: float) -> float:
    """
    Published decay of a single coherent state, exp(-gamma^4 ((gamma^2 - 1)/(gamma^2 + 1))^2 tau).

    Parameters
    ----------
    gamma : float
        Coherent state label
    tau : float
        Dimensionless time

    Returns
    -------
    float
        n(tau)
    """
    gamma = check_gamma(gamma, allow_zero=True)
    return math.exp(-gamma ** 4 * slow_linear_coefficient(gamma) * tau)


def is_slow(gamma1: float, gamma2: float) -> bool:
    """Whether the leading rate vanishes (gamma1 = gamma2 or gamma1 gamma2 = 1)"""
    return abs(gamma1 - gamma2) < REGIME_TOLERANCE or abs(gamma1 * gamma2 - 1.0) < REGIME_TOLERANCE


def semiclassical_report(gamma1: float, gamma2: float, j: float, taus: Sequence[float]) -> dict:
    """
    Collect saddle, coefficients and all predictions for one pair of labels.

    Predictions that do not apply (wrong regime, times beyond the expansion) are reported as
    ``None``.

    Parameters
    ----------
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label
    j : float
        Spin quantum number
    taus : Sequence[float]
        Dimensionless times

    Returns
    -------
    dict
        JSON-safe report
    """
    report = {'gamma1': float(gamma1), 'gamma2': float(gamma2), 'j': float(j),
              'regime': 'slow' if is_slow(gamma1, gamma2) else 'fast',
              'fast_rate_coefficient': fast_rate_coefficient(gamma1, gamma2)}
    try:
        saddle = saddle_point(gamma1, gamma2)
    except BoundarySaddle as error:
        logger.info('No semiclassical expansion for (%g, %g): %s', gamma1, gamma2, error)
        report['saddle'] = None
    else:
        report['saddle'] = saddle.get_state()
        expansion = coeff_expansion(saddle.point)
        report['coefficients'] = {'a0': expansion.a0, 'a1': expansion.a1, 'b0': expansion.b0,
                                  'b1': expansion.b1, 'b2': expansion.b2(0.0)}
        report['ratio_coefficients'] = {
            density: ratio_coefficients(float(gamma1), float(gamma2), False, density)._asdict()
            for density in ('bare', 'stirling')}

    rows = []
    for tau in taus:
        row = {'tau': float(tau)}
        row['fast'] = None if is_slow(gamma1, gamma2) else predict_fast(gamma1, gamma2, j, tau)
        row['slow_exp'] = predict_slow_exp(gamma1, tau) if is_slow(gamma1, gamma2) else None
        try:
            row['slow_poly'] = predict_slow_poly(gamma1, gamma2, tau)
        except WrongRegime:
            row['slow_poly'] = None
        if report['saddle'] is not None and j * tau <= EXPANSION_REGIME:
            row['semiclassical'] = n_ratio_semiclassical(gamma1, gamma2, j, tau)
        else:
            row['semiclassical'] = None
        rows.append(row)
    report['predictions'] = rows
    return report
