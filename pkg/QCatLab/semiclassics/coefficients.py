"""
Short time coefficients of the column sum S(n, k, tau).

For short times S(nu, eta, t) = 1 + a t + b t^2 + O(t^3) with the rescaled time t = j tau.
:py:func:`s_derivative_coeffs` gives a and b at finite j; :py:func:`coeff_expansion` and the field
functions give the leading terms of their expansion in 1/j,
a = a0 + a1/j + ..., b = b0 + b1/j + b2/j^2 + ... . The field functions accept scalars or numpy
arrays so they can be used as integrands.
"""
from typing import Callable, NamedTuple, Union

import numpy as np

from QCatLab.errors import DomainError
from QCatLab.semiclassics.action import ReducedPoint


ArrayLike = Union[float, np.ndarray]

W_TOLERANCE = 1e-8
"""float: Smallest w for which the expansion coefficients are evaluated"""


def w_field(nu: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """w = sqrt((1 - (nu - eta)^2)(1 - (nu + eta)^2))"""
    return np.sqrt((1.0 - (nu - eta) ** 2) * (1.0 - (nu + eta) ** 2))


def a0_field(nu: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """Leading coefficient a0 = w + eta^2 - 1 + nu^2"""
    return w_field(nu, eta) + eta ** 2 - 1.0 + nu ** 2


def a1_field(nu: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """First correction a1 = nu (1 - nu^2 + eta^2 - w) / w"""
    w = w_field(nu, eta)
    return nu * (1.0 - nu ** 2 + eta ** 2 - w) / w


def b0_field(nu: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """Leading coefficient b0 = a0^2 / 2"""
    return 0.5 * a0_field(nu, eta) ** 2


def b1_field(nu: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """First correction b1 = a0 a1 - nu (nu^2 + w - eta^2 - 1)"""
    w = w_field(nu, eta)
    return a0_field(nu, eta) * a1_field(nu, eta) - nu * (nu ** 2 + w - eta ** 2 - 1.0)


def b2_field(nu: ArrayLike, eta: ArrayLike, a2: ArrayLike = 0.0) -> ArrayLike:
    """
    Second correction b2.

    The coefficient a2 enters only through the product 2 a0 a2. It defaults to zero; passing other
    values shows how much b2 depends on it.

    Parameters
    ----------
    nu : float or numpy.ndarray
        Reduced mean quantum number
    eta : float or numpy.ndarray
        Reduced relative quantum number
    a2 : float or numpy.ndarray, default=0.0
        Second order coefficient of a

    Returns
    -------
    float or numpy.ndarray
        b2(nu, eta)
    """
    w = w_field(nu, eta)
    a0, a1 = a0_field(nu, eta), a1_field(nu, eta)
    nu2, eta2 = nu ** 2, eta ** 2
    quartic = (eta2 - nu2) ** 2 - 2.0 * (eta2 + nu2) + 1.0
    polynomial = (-2.0 + 4.0 * nu2 ** 3 - 2.0 * eta2 ** 3 - 10.0 * nu2 ** 2 * eta2
                  + 8.0 * nu2 * eta2 ** 2 - 10.0 * nu2 ** 2 - 8.0 * nu2 * eta2 + 2.0 * eta2 ** 2
                  + 8.0 * nu2 + 2.0 * eta2)
    tail = 3.0 * eta2 ** 2 + 7.0 * nu2 ** 2 - 10.0 * nu2 * eta2 - 10.0 * nu2 - 6.0 * eta2 + 3.0
    return ((2.0 * a0 * a2 + a1 ** 2) * quartic + polynomial) / (2.0 * w ** 2) + tail / (4.0 * w)


COEFFICIENT_FIELDS: dict[str, Callable[[ArrayLike, ArrayLike], ArrayLike]] = {
    'a0': a0_field,
    'a1': a1_field,
    'b0': b0_field,
    'b1': b1_field,
    'b2': b2_field
}
"""dict[str, Callable]: Expansion coefficients by name"""


class CoefficientExpansion(NamedTuple):
    """Expansion coefficients of a and b at one point"""

    a0: float
    """float: Leading coefficient of a"""
    a1: float
    """float: 1/j coefficient of a"""
    b0: float
    """float: Leading coefficient of b"""
    b1: float
    """float: 1/j coefficient of b"""
    b2: Callable[[float], float]
    """Callable[[float], float]: 1/j^2 coefficient of b as a function of a2"""


def coeff_expansion(point: ReducedPoint) -> CoefficientExpansion:
    """
    Evaluate the expansion coefficients of a and b at one point.

    Parameters
    ----------
    point : :py:class:`~QCatLab.semiclassics.action.ReducedPoint`
        Point of the domain away from its boundary

    Returns
    -------
    :py:class:`CoefficientExpansion`
        a0, a1, b0, b1 and b2(a2)

    Raises
    ------
    DomainError
        If w at the point is below :py:data:`W_TOLERANCE`
    """
    if not point.is_inside() or point.w() <= W_TOLERANCE:
        raise DomainError(f"Expansion coefficients need w > {W_TOLERANCE:g}, point {point} "
                          f"has w = {point.w():.3g}")
    nu, eta = point.nu, point.eta
    return CoefficientExpansion(
        float(a0_field(nu, eta)), float(a1_field(nu, eta)), float(b0_field(nu, eta)),
        float(b1_field(nu, eta)), lambda a2=0.0: float(b2_field(nu, eta, a2)))


def _shifted_w(point: ReducedPoint, shift: float, unit: float) -> float:
    first = unit - (point.v - shift) ** 2
    second = unit - (point.u - shift) ** 2
    if first < 0.0 or second < 0.0:
        raise DomainError(f"Coefficient w is undefined at {point} for the shift {shift:g}")
    return float(np.sqrt(first * second))


def s_derivative_coeffs(point: ReducedPoint, j: float,
                        half_shift: bool = False) -> tuple[float, float]:
    """
    Short time coefficients a and b of S at finite j.

    a = w1 + eta^2 - 1 + (nu - 1/2j)^2 and
    b = (a^2 + w1 (w2 - w1) + 2 w1 (-nu/j + 3/(4j^2))) / 2, where w1 and w2 are w with both
    arguments shifted by 1/2j and 3/2j.

    With ``half_shift`` every 1 in these expressions (inside w1, w2 and in a) is replaced by
    (1 + 1/2j)^2 and the constant 3/(4j^2) by 1/j^2. This accounts for
    g_l = (j + 1/2)^2 - (l - 1/2)^2 exactly: a then equals the initial derivative
    -(sqrt(g_(n+k)) - sqrt(g_(n-k)))^2 / (2 j^2) of S and 2b its second derivative.

    Parameters
    ----------
    point : :py:class:`~QCatLab.semiclassics.action.ReducedPoint`
        Point (n/j, k/j)
    j : float
        Spin quantum number
    half_shift : bool, default=False
        Whether to use the exact finite j shifts

    Returns
    -------
    tuple[float, float]
        (a, b)

    Raises
    ------
    DomainError
        If the arguments of the square roots in w1 or w2 are negative
    """
    if j <= 0.0:
        raise DomainError(f"Spin quantum number must be positive, got '{j}'")
    unit = (1.0 + 0.5 / j) ** 2 if half_shift else 1.0
    w1 = _shifted_w(point, 0.5 / j, unit)
    w2 = _shifted_w(point, 1.5 / j, unit)
    a = w1 + point.eta ** 2 - unit + (point.nu - 0.5 / j) ** 2
    constant = 1.0 if half_shift else 0.75
    b = 0.5 * (a ** 2 + w1 * (w2 - w1) + 2.0 * w1 * (-point.nu / j + constant / j ** 2))
    return a, b
