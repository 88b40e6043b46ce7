"""
Action of the initial cat block in reduced coordinates.

For phi1 = phi2 = 0 the entries of |gamma1><gamma2| are rho_n(k, 0) = C exp(j S0(nu, eta)) with
nu = n/j and eta = k/j. In the rotated coordinates u = nu + eta (= m1/j) and v = nu - eta (= m2/j)
the action separates, S0 = A(u) + B(v), with

    A(u) = ln(gamma1) (1 - u) - (p(1 - u) + p(1 + u)) / 2,    p(x) = x ln x,

and B(v) of the same form with gamma2. All derivatives are therefore elementary closed forms.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import xlogy

from QCatLab.errors import BoundarySaddle, DomainError


logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-6
"""float: Smallest value of w at the saddle that still counts as an interior maximum"""


@dataclass(frozen=True)
class ReducedPoint:
    """
    Point (nu, eta) = (n/j, k/j) of the continuous lattice.

    Attributes
    ----------
    nu : float
        Reduced mean quantum number
    eta : float
        Reduced relative quantum number
    """

    nu: float
    eta: float

    @classmethod
    def from_uv(cls, u: float, v: float) -> 'ReducedPoint':
        """Create a point from u = nu + eta and v = nu - eta"""
        return cls(0.5 * (u + v), 0.5 * (u - v))

    @property
    def u(self) -> float:
        """Reduced first magnetic number m1/j = nu + eta"""
        return self.nu + self.eta

    @property
    def v(self) -> float:
        """Reduced second magnetic number m2/j = nu - eta"""
        return self.nu - self.eta

    def w(self) -> float:
        """sqrt((1 - (nu - eta)^2)(1 - (nu + eta)^2)), zero on the boundary of the domain"""
        return math.sqrt(max((1.0 - self.v ** 2) * (1.0 - self.u ** 2), 0.0))

    def is_inside(self, strict: bool = False) -> bool:
        """Whether |nu + eta| <= 1 and |nu - eta| <= 1 (``<`` if ``strict``)"""
        if strict:
            return abs(self.u) < 1.0 and abs(self.v) < 1.0
        return abs(self.u) <= 1.0 and abs(self.v) <= 1.0

    def boundary_distance(self) -> float:
        """Distance 1 - max(|u|, |v|) to the boundary of the domain in u and v"""
        return 1.0 - max(abs(self.u), abs(self.v))

    def __str__(self) -> str:
        return f'(nu={self.nu:.6g}, eta={self.eta:.6g})'


@dataclass(frozen=True, eq=False)
class SaddleData:
    """
    Maximum of the action together with its Hessian.

    Attributes
    ----------
    point : :py:class:`ReducedPoint`
        Position (nu0, eta0) of the maximum
    hessian : numpy.ndarray
        Second derivatives sigma of S0 in (nu, eta)
    s0_value : float
        S0 at the maximum
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label
    """

    point: ReducedPoint
    hessian: np.ndarray
    s0_value: float
    gamma1: float
    gamma2: float

    @property
    def det_sigma(self) -> float:
        """Determinant of the Hessian"""
        return float(np.linalg.det(self.hessian))

    def get_state(self) -> dict:
        """
        Get a JSON-safe representation of the saddle.

        Returns
        -------
        dict
            Position, Hessian, action value and w at the maximum
        """
        return {
            'nu0': self.point.nu,
            'eta0': self.point.eta,
            'w0': self.point.w(),
            's0': self.s0_value,
            'hessian': self.hessian.tolist(),
            'det_sigma': self.det_sigma
        }


def check_gamma(gamma: float, allow_zero: bool = False) -> float:
    """
    Validate a real coherent state label.

    Parameters
    ----------
    gamma : float
        Label tan(theta/2) at phi = 0
    allow_zero : bool, default=False
        Whether gamma = 0 (the north pole) is accepted

    Returns
    -------
    float
        The label as float

    Raises
    ------
    DomainError
        If gamma is negative, not finite, or zero while ``allow_zero`` is False
    """
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma < 0.0 or (gamma == 0.0 and not allow_zero):
        raise DomainError(f"Coherent state label must be positive and finite, got '{gamma}'")
    return gamma


def _log_gamma(gamma: float) -> float:
    return math.log(check_gamma(gamma))


def saddle_uv(gamma1: float, gamma2: float) -> tuple[float, float]:
    """Saddle coordinates u0 = (1 - gamma1^2)/(1 + gamma1^2) and v0 (same with gamma2)"""
    gamma1 = check_gamma(gamma1, allow_zero=True)
    gamma2 = check_gamma(gamma2, allow_zero=True)
    return (1.0 - gamma1 ** 2) / (1.0 + gamma1 ** 2), (1.0 - gamma2 ** 2) / (1.0 + gamma2 ** 2)


def line_action(x: Union[float, np.ndarray], gamma: float) -> Union[float, np.ndarray]:
    """
    One-dimensional part A(x) = ln(gamma)(1 - x) - (p(1 - x) + p(1 + x))/2 of the action.

    Parameters
    ----------
    x : float or numpy.ndarray
        Coordinate u (with gamma1) or v (with gamma2) in [-1, 1]
    gamma : float
        Coherent state label

    Returns
    -------
    float or numpy.ndarray
        A(x)
    """
    return _log_gamma(gamma) * (1.0 - x) - 0.5 * (xlogy(1.0 - x, 1.0 - x) + xlogy(1.0 + x, 1.0 + x))


def line_derivatives(x: float, gamma: float, order: int) -> np.ndarray:
    """
    Derivatives A(x), A'(x), ..., A^(order)(x) of the one-dimensional action.

    For n >= 2, A^(n)(x) = -(n-2)!/2 ((-1)^n / (1+x)^(n-1) + 1 / (1-x)^(n-1)).

    Parameters
    ----------
    x : float
        Interior coordinate (|x| < 1)
    gamma : float
        Coherent state label
    order : int
        Highest derivative

    Returns
    -------
    numpy.ndarray
        Array of ``order + 1`` derivatives
    """
    if abs(x) >= 1.0:
        raise DomainError(f"Derivatives of the action need an interior point, got '{x}'")
    derivatives = np.zeros(order + 1)
    derivatives[0] = line_action(x, gamma)
    if order >= 1:
        derivatives[1] = -_log_gamma(gamma) - 0.5 * math.log((1.0 + x) / (1.0 - x))
    for n in range(2, order + 1):
        derivatives[n] = -0.5 * math.factorial(n - 2) * ((-1) ** n / (1.0 + x) ** (n - 1)
                                                         + 1.0 / (1.0 - x) ** (n - 1))
    return derivatives


def _check_point(point: ReducedPoint) -> None:
    if not point.is_inside():
        raise DomainError(f"Point {point} lies outside the physical domain |nu +- eta| <= 1")


def action_s0(point: ReducedPoint, gamma1: float, gamma2: float) -> float:
    """
    Action S0(nu, eta) of the initial cat block.

    S0 = (1 - nu) ln(gamma1 gamma2) + eta ln(gamma2 / gamma1)
         - (p(1-nu-eta) + p(1+nu+eta) + p(1-nu+eta) + p(1+nu-eta)) / 2

    Parameters
    ----------
    point : :py:class:`ReducedPoint`
        Point of the closed domain |nu +- eta| <= 1
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)

    Returns
    -------
    float
        S0 at ``point``

    Raises
    ------
    DomainError
        If the point lies outside the domain or a label is invalid
    """
    _check_point(point)
    return float(line_action(point.u, gamma1) + line_action(point.v, gamma2))


def action_gradient(point: ReducedPoint, gamma1: float, gamma2: float) -> np.ndarray:
    """
    Gradient (dS0/dnu, dS0/deta) at an interior point.

    Parameters
    ----------
    point : :py:class:`ReducedPoint`
        Interior point
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label

    Returns
    -------
    numpy.ndarray
        Gradient in (nu, eta)
    """
    _check_point(point)
    d_u = line_derivatives(point.u, gamma1, 1)[1]
    d_v = line_derivatives(point.v, gamma2, 1)[1]
    return np.array([d_u + d_v, d_u - d_v])


def action_hessian(point: ReducedPoint, gamma1: float, gamma2: float) -> np.ndarray:
    """
    Hessian of S0 in (nu, eta) at an interior point.

    With a = A''(u) = -1/(1-u^2) and b = B''(v) = -1/(1-v^2) the Hessian is
    [[a + b, a - b], [a - b, a + b]].

    Parameters
    ----------
    point : :py:class:`ReducedPoint`
        Interior point
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label

    Returns
    -------
    numpy.ndarray
        Symmetric 2x2 matrix
    """
    _check_point(point)
    a = line_derivatives(point.u, gamma1, 2)[2]
    b = line_derivatives(point.v, gamma2, 2)[2]
    return np.array([[a + b, a - b], [a - b, a + b]])


def action_derivatives(point: ReducedPoint, gamma1: float, gamma2: float,
                       order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Derivatives of both one-dimensional parts of the action up to ``order``.

    Partial derivatives in (nu, eta) follow from d/dnu = d/du + d/dv and d/deta = d/du - d/dv.

    Parameters
    ----------
    point : :py:class:`ReducedPoint`
        Interior point
    gamma1 : float
        First coherent state label
    gamma2 : float
        Second coherent state label
    order : int
        Highest derivative

    Returns
    -------
    tuple[numpy.ndarray, numpy.ndarray]
        Derivatives of A at u and of B at v
    """
    _check_point(point)
    return line_derivatives(point.u, gamma1, order), line_derivatives(point.v, gamma2, order)


def saddle_point(gamma1: float, gamma2: float) -> SaddleData:
    """
    Maximum of the action.

    nu0 = (1 - gamma1^2 gamma2^2) / ((1 + gamma1^2)(1 + gamma2^2)),
    eta0 = (gamma2^2 - gamma1^2) / ((1 + gamma1^2)(1 + gamma2^2)).

    Parameters
    ----------
    gamma1 : float
        First coherent state label (non-negative, finite)
    gamma2 : float
        Second coherent state label (non-negative, finite)

    Returns
    -------
    :py:class:`SaddleData`
        Position, Hessian and value of the maximum

    Raises
    ------
    BoundarySaddle
        If w at the maximum is below :py:data:`BOUNDARY_TOLERANCE`
    DomainError
        If a label is negative or not finite
    """
    u0, v0 = saddle_uv(gamma1, gamma2)
    point = ReducedPoint.from_uv(u0, v0)
    if point.w() < BOUNDARY_TOLERANCE:
        raise BoundarySaddle(f"Maximum of the action for labels ({gamma1}, {gamma2}) lies on the "
                             f"boundary (w = {point.w():.3g})")
    hessian = action_hessian(point, gamma1, gamma2)
    return SaddleData(point, hessian, action_s0(point, gamma1, gamma2), float(gamma1),
                      float(gamma2))


def maximize_action(gamma1: float, gamma2: float) -> ReducedPoint:
    """
    Locate the maximum of the action numerically, starting from the centre of the domain.

    The search runs in unbounded coordinates (u, v) = (tanh x, tanh y), so every trial point lies
    inside the domain.

    Parameters
    ----------
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)

    Returns
    -------
    :py:class:`ReducedPoint`
        Numerical maximum
    """
    log1, log2 = _log_gamma(gamma1), _log_gamma(gamma2)

    def _negative_action(xy: np.ndarray) -> tuple[float, np.ndarray]:
        u, v = np.tanh(xy)
        value = line_action(u, gamma1) + line_action(v, gamma2)
        # dA/du = -ln(gamma) - artanh(u) and du/dx = 1 - u^2
        gradient = np.array([(-log1 - xy[0]) * (1.0 - u ** 2), (-log2 - xy[1]) * (1.0 - v ** 2)])
        return -float(value), -gradient

    result = minimize(_negative_action, np.zeros(2), jac=True, method='BFGS',
                      options={'gtol': 1e-13})
    if not result.success:
        logger.debug('Action maximization for (%g, %g) stopped early: %s', gamma1, gamma2,
                     result.message)
    u, v = np.tanh(result.x)
    return ReducedPoint.from_uv(float(u), float(v))
