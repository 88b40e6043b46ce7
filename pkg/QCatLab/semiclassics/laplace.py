"""
Higher order Laplace method for integrals I[f] = integral of f exp(j S0) over the domain.

Around the maximum of the action,

    I[f] = exp(j S0max) (2 pi / j) |det sigma|^(-1/2)
           sum_l (L^l (f exp(j R)))(saddle) / (l! (2j)^l),

where sigma is the Hessian of S0, R the deviation of S0 from its quadratic approximation and
L = <-sigma^(-1) grad, grad>. Expanding exp(j R) = sum_q j^q R^q / q! and collecting powers of 1/j
gives I[f] = prefactor (I0 + I1/j + I2/j^2 + ...). All Taylor polynomials are stored as 2D arrays
``c[i, k]`` of the coefficients of dnu^i deta^k and multiplied with ``scipy.signal.convolve2d``.

The module also provides the two references used to validate the expansion: adaptive quadrature
of the continuous integral and the lattice sum over the exact initial block.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, nquad, quad
from scipy.signal import convolve2d

from QCatLab.errors import DerivativeInstability, DomainError, QuadratureFailure, WrongRegime
from QCatLab.norms import cat_block
from QCatLab.semiclassics.action import (check_gamma, line_action, line_derivatives, saddle_point,
                                         saddle_uv)
from QCatLab.semiclassics.coefficients import COEFFICIENT_FIELDS, b2_field, w_field
from QCatLab.spin import CoherentLabel, SpinQuantum


logger = logging.getLogger(__name__)

Field = Callable[[float, float], float]

MAX_ORDER = 2
"""int: Highest power of 1/j collected by the expansion"""

STENCIL_RADIUS = 4
"""int: Half width of the finite difference stencils used for generic integrands"""

RICHARDSON_RTOL = 1e-3
"""float: Largest relative disagreement of finite differences at two step sizes"""

EXPANSION_REGIME = 0.3
"""float: Largest rescaled time j tau accepted by the semiclassical ratio"""

DENSITIES = ('bare', 'stirling')
"""tuple[str]: Continuum models of the initial block (exp(j S0) alone or with the w^(-1/2) weight)"""


def _mask(degree: int) -> np.ndarray:
    index = np.arange(degree + 1)
    return (index[:, None] + index[None, :]) <= degree


def _multiply(first: np.ndarray, second: np.ndarray, degree: int) -> np.ndarray:
    """Product of two Taylor polynomials truncated at total ``degree``"""
    product = convolve2d(first, second)[:degree + 1, :degree + 1]
    return np.where(_mask(degree), product, 0.0)


def _differentiate(coefficients: np.ndarray, axis: int) -> np.ndarray:
    result = np.zeros_like(coefficients)
    factors = np.arange(1, coefficients.shape[axis])
    if axis == 0:
        result[:-1, :] = coefficients[1:, :] * factors[:, None]
    else:
        result[:, :-1] = coefficients[:, 1:] * factors[None, :]
    return result


def _apply_operator(coefficients: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Apply L = sum_ab metric_ab d_a d_b to a Taylor polynomial"""
    d_nu = _differentiate(coefficients, 0)
    d_eta = _differentiate(coefficients, 1)
    return (metric[0, 0] * _differentiate(d_nu, 0) + 2.0 * metric[0, 1] * _differentiate(d_nu, 1)
            + metric[1, 1] * _differentiate(d_eta, 1))


def _stencil_weights(order: int, radius: int) -> np.ndarray:
    """Central finite difference weights of the ``order``-th derivative on 2 radius + 1 points"""
    weights = np.zeros(2 * radius + 1)
    if order == 0:
        weights[radius] = 1.0
        return weights
    offsets = np.arange(-radius, radius + 1, dtype=float)
    vandermonde = offsets[None, :] ** np.arange(2 * radius + 1)[:, None]
    rhs = np.zeros(2 * radius + 1)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vandermonde, rhs)


@dataclass(frozen=True, eq=False)
class LaplaceExpansion:
    """
    Expansion of I[f] in powers of 1/j.

    The orders are independent of j; the j dependent prefactor
    exp(j S0max) (2 pi / j) |det sigma|^(-1/2) is applied by :py:meth:`evaluate`.

    Attributes
    ----------
    orders : tuple[float, float, float]
        I0, I1 and I2
    terms_used : int
        Largest power l of the operator L that was applied
    s0_value : float
        Action at the maximum
    det_sigma : float
        Determinant of the Hessian at the maximum
    """

    orders: tuple[float, float, float]
    terms_used: int
    s0_value: float
    det_sigma: float

    def series(self, j: float, n_orders: int = MAX_ORDER + 1) -> float:
        """
        Sum of the first ``n_orders`` orders, I0 + I1/j + ... .

        Parameters
        ----------
        j : float
            Spin quantum number
        n_orders : int, default=3
            Number of orders to include

        Returns
        -------
        float
            Truncated series
        """
        return float(sum(order / j ** power for power, order in enumerate(self.orders[:n_orders])))

    def evaluate(self, j: float, scaled: bool = False, n_orders: int = MAX_ORDER + 1) -> float:
        """
        Approximate I[f] at a given j.

        Parameters
        ----------
        j : float
            Spin quantum number
        scaled : bool, default=False
            Whether to omit the factor exp(j S0max) (as in :py:func:`quadrature_oracle`)
        n_orders : int, default=3
            Number of orders to include

        Returns
        -------
        float
            Approximation of I[f]
        """
        value = 2.0 * math.pi / j / math.sqrt(abs(self.det_sigma)) * self.series(j, n_orders)
        if not scaled:
            value *= math.exp(j * self.s0_value)
        return value


class LaplaceEngine:
    """
    Laplace expansions around the maximum of the action for one pair of labels.

    The Taylor polynomial of the residual action and its powers are computed once from the
    closed-form derivatives of S0 and shared by all integrands.

    Examples
    --------
    .. code-block:: python

        # Create the engine and expand the normalisation integral and the a0 integral
        engine = LaplaceEngine(0.3, 0.9)
        norm = engine.expand()
        rate = engine.expand(a0_field)

        # Leading order of the ratio is a0 at the maximum
        print(rate.orders[0] / norm.orders[0])

    Attributes
    ----------
    saddle : :py:class:`~QCatLab.semiclassics.action.SaddleData`
        Maximum of the action
    max_l : int
        Largest power of L applied (at most 6 contribute to the first three orders)
    residual : bool
        Whether the residual action R is included (``False`` reduces S0 to its quadratic part)
    metric : numpy.ndarray
        -sigma^(-1)
    """

    def __init__(self, gamma1: float, gamma2: float, max_l: int = 6, residual: bool = True):
        """
        Prepare the expansion for one pair of labels.

        Parameters
        ----------
        gamma1 : float
            First coherent state label (positive, finite)
        gamma2 : float
            Second coherent state label (positive, finite)
        max_l : int, default=6
            Largest power of L (at least 3)
        residual : bool, default=True
            Whether the residual action R is included

        Raises
        ------
        BoundarySaddle
            If the maximum lies on the boundary of the domain
        """
        if max_l < 3:
            raise ValueError(f"The expansion needs at least three powers of L, got '{max_l}'")
        check_gamma(gamma1)
        check_gamma(gamma2)
        self.saddle = saddle_point(gamma1, gamma2)
        self.max_l: int = min(max_l, 3 * MAX_ORDER)
        self.residual: bool = residual
        self.metric: np.ndarray = -np.linalg.inv(self.saddle.hessian)
        self.degree: int = 2 * self.max_l

        # Residual action: Taylor terms of degree >= 3 of A(u0 + dnu + deta) + B(v0 + dnu - deta)
        residual_action = np.zeros((self.degree + 1, self.degree + 1))
        if residual:
            point = self.saddle.point
            a_derivatives = line_derivatives(point.u, gamma1, self.degree)
            b_derivatives = line_derivatives(point.v, gamma2, self.degree)
            for n in range(3, self.degree + 1):
                for i in range(n + 1):
                    binomial = math.comb(n, i) / math.factorial(n)
                    residual_action[i, n - i] += a_derivatives[n] * binomial
                    residual_action[i, n - i] += b_derivatives[n] * binomial * (-1) ** (n - i)

        # R^q / q! for every q that can reach the orders 0..MAX_ORDER
        self.residual_powers: list[np.ndarray] = []
        power = np.zeros_like(residual_action)
        power[0, 0] = 1.0
        for q in range(2 * MAX_ORDER + 1):
            self.residual_powers.append(power)
            power = _multiply(power, residual_action, self.degree) / (q + 1)
        logger.debug('Laplace engine for (%g, %g) at %s with max_l=%d', gamma1, gamma2,
                     self.saddle.point, self.max_l)

    def taylor(self, f: Optional[Field] = None) -> np.ndarray:
        """
        Taylor polynomial of an integrand at the maximum, up to total degree 4.

        The constant term is evaluated directly. Derivatives come from tensor products of central
        finite difference stencils at the step sizes h and h/2, combined by Richardson
        extrapolation.

        Parameters
        ----------
        f : Callable[[float, float], float], optional
            Integrand f(nu, eta); ``None`` means f = 1

        Returns
        -------
        numpy.ndarray
            Coefficients ``c[i, k]`` of dnu^i deta^k, padded to the engine degree

        Raises
        ------
        DerivativeInstability
            If the estimates at the two step sizes disagree
        """
        coefficients = np.zeros((self.degree + 1, self.degree + 1))
        nu0, eta0 = self.saddle.point.nu, self.saddle.point.eta
        if f is None:
            coefficients[0, 0] = 1.0
            return coefficients
        coefficients[0, 0] = float(f(nu0, eta0))
        taylor_degree = 2 * MAX_ORDER

        radius = STENCIL_RADIUS
        offsets = np.arange(-radius, radius + 1, dtype=float)
        step = self.saddle.point.boundary_distance() / (8.0 * radius)
        grids = []
        for h in (step, step / 2.0):
            grid = np.array([[float(f(nu0 + di * h, eta0 + dk * h)) for dk in offsets]
                             for di in offsets])
            if not np.all(np.isfinite(grid)):
                raise DerivativeInstability(f"Integrand is not finite near the maximum "
                                            f"{self.saddle.point}")
            grids.append((h, grid))
        weights = [_stencil_weights(order, radius) for order in range(taylor_degree + 1)]

        estimates = {}
        for i in range(taylor_degree + 1):
            for k in range(taylor_degree + 1 - i):
                if i + k == 0:
                    continue
                coarse, fine = (weights[i] @ grid @ weights[k] / h ** (i + k) for h, grid in grids)
                accuracy = 2 * math.ceil((2 * radius + 1 - max(i, k)) / 2)
                refined = fine + (fine - coarse) / (2.0 ** accuracy - 1.0)
                estimates[i, k] = (refined, abs(fine - coarse))
        scale = max([abs(coefficients[0, 0])] + [abs(value) for value, _ in estimates.values()])
        for (i, k), (value, disagreement) in estimates.items():
            if disagreement > RICHARDSON_RTOL * max(abs(value), scale):
                raise DerivativeInstability(f"Finite difference estimates of d^{i + k} f / "
                                            f"dnu^{i} deta^{k} disagree by {disagreement:.3g}")
            coefficients[i, k] = value / (math.factorial(i) * math.factorial(k))
        return coefficients

    def expand(self, f: Optional[Field] = None) -> LaplaceExpansion:
        """
        Expand I[f] in powers of 1/j.

        Parameters
        ----------
        f : Callable[[float, float], float], optional
            Integrand f(nu, eta); ``None`` means f = 1

        Returns
        -------
        :py:class:`LaplaceExpansion`
            Orders I0, I1, I2
        """
        f_taylor = self.taylor(f)
        orders = [0.0] * (MAX_ORDER + 1)
        for q, residual_power in enumerate(self.residual_powers):
            polynomial = _multiply(f_taylor, residual_power, self.degree)
            # L^l (f R^q) at the maximum contributes to the order l - q once 2l >= 3q
            for l in range(self.max_l + 1):
                order = l - q
                if order > MAX_ORDER:
                    break
                if 2 * l >= 3 * q and order >= 0:
                    orders[order] += polynomial[0, 0] / (math.factorial(l) * 2.0 ** l)
                polynomial = _apply_operator(polynomial, self.metric)
        return LaplaceExpansion(tuple(orders), self.max_l, self.saddle.s0_value,
                                self.saddle.det_sigma)


def laplace_expand(f: Optional[Field], gamma1: float, gamma2: float, max_l: int = 6,
                   residual: bool = True) -> LaplaceExpansion:
    """
    Expand I[f] = integral of f exp(j S0) in powers of 1/j.

    Parameters
    ----------
    f : Callable[[float, float], float] or None
        Integrand f(nu, eta), smooth near the maximum; ``None`` means f = 1
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)
    max_l : int, default=6
        Largest power of L (at least 3)
    residual : bool, default=True
        Whether the residual action R is included

    Returns
    -------
    :py:class:`LaplaceExpansion`
        Orders I0, I1, I2

    Raises
    ------
    BoundarySaddle
        If the maximum lies on the boundary of the domain
    DerivativeInstability
        If the finite differences of ``f`` are unstable
    """
    return LaplaceEngine(gamma1, gamma2, max_l, residual).expand(f)


def _peak_action(gamma1: float, gamma2: float) -> tuple[float, float, float]:
    u0, v0 = saddle_uv(check_gamma(gamma1), check_gamma(gamma2))
    return u0, v0, float(line_action(u0, gamma1) + line_action(v0, gamma2))


def quadrature_oracle(f: Optional[Field], gamma1: float, gamma2: float, j: float,
                      scaled: bool = False) -> float:
    """
    Integrate f exp(j S0) over the domain |nu +- eta| <= 1 by adaptive quadrature.

    The integral runs over u = nu + eta and v = nu - eta (Jacobian 1/2) with the maximum passed
    to the integrator as a break point. The integrand is scaled by exp(-j S0max).

    Parameters
    ----------
    f : Callable[[float, float], float] or None
        Integrand f(nu, eta); ``None`` means f = 1 (integrated as a product of two 1D integrals)
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)
    j : float
        Spin quantum number (at least 4)
    scaled : bool, default=False
        Whether to return the integral without the factor exp(j S0max)

    Returns
    -------
    float
        I[f]

    Raises
    ------
    DomainError
        If j < 4 or a label is invalid
    QuadratureFailure
        If the integrator does not reach the requested tolerance
    """
    if j < 4.0:
        raise DomainError(f"Quadrature reference needs j >= 4, got '{j}'")
    u0, v0, peak = _peak_action(gamma1, gamma2)
    options = {'epsrel': 1e-8, 'epsabs': 1e-14, 'limit': 200}

    with warnings.catch_warnings():
        warnings.simplefilter('error', IntegrationWarning)
        try:
            if f is None:
                part_u, _ = quad(lambda u: math.exp(j * (line_action(u, gamma1)
                                                         - line_action(u0, gamma1))),
                                 -1.0, 1.0, points=[u0], **options)
                part_v, _ = quad(lambda v: math.exp(j * (line_action(v, gamma2)
                                                         - line_action(v0, gamma2))),
                                 -1.0, 1.0, points=[v0], **options)
                value = 0.5 * part_u * part_v
            else:
                def _integrand(u: float, v: float) -> float:
                    weight = math.exp(j * (line_action(u, gamma1) + line_action(v, gamma2) - peak))
                    if weight == 0.0:
                        return 0.0
                    return 0.5 * weight * float(f(0.5 * (u + v), 0.5 * (u - v)))

                value, error = nquad(_integrand, [[-1.0, 1.0], [-1.0, 1.0]],
                                     opts=[dict(options, points=[u0]),
                                           dict(options, points=[v0])])
                logger.debug('Quadrature for (%g, %g) at j=%g: %.6g +- %.2g', gamma1, gamma2, j,
                             value, error)
        except IntegrationWarning as warning:
            raise QuadratureFailure(f"Quadrature for labels ({gamma1}, {gamma2}) at j={j} "
                                    f"failed: {warning}") from warning

    if not scaled:
        value *= math.exp(j * peak)
    return float(value)


def lattice_ratio(f: Field, spin: SpinQuantum, gamma1: float, gamma2: float) -> float:
    """
    Discrete average sum f(n/j, k/j) rho_n(k, 0) / sum rho_n(k, 0) over the exact initial block.

    Lattice points where ``f`` is not finite (the boundary w = 0 for the expansion coefficients)
    are left out of both sums.

    Parameters
    ----------
    f : Callable[[numpy.ndarray, numpy.ndarray], numpy.ndarray]
        Integrand f(nu, eta), evaluated on arrays
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the state
    gamma1 : float
        First coherent state label (non-negative, finite)
    gamma2 : float
        Second coherent state label (non-negative, finite)

    Returns
    -------
    float
        Weighted lattice average of ``f``
    """
    rho = cat_block(spin, CoherentLabel.from_gamma(check_gamma(gamma1, allow_zero=True)),
                    CoherentLabel.from_gamma(check_gamma(gamma2, allow_zero=True)))
    numerator = denominator = 0.0
    for twice_k, twice_m, value in rho.entries():
        nu, eta = twice_m / spin.twice_j, twice_k / spin.twice_j
        try:
            with np.errstate(divide='ignore', invalid='ignore'):
                sample = float(f(nu, eta))
        except ZeroDivisionError:
            continue
        if not math.isfinite(sample):
            continue
        numerator += sample * value.real
        denominator += value.real
    return numerator / denominator


class RatioCoefficients(NamedTuple):
    """Coefficients of n = 1 + t (c0 + c1/j) + t^2 (d0 + d1/j + d2/j^2) with t = j tau"""

    c0: float
    """float: Leading linear coefficient"""
    c1: float
    """float: 1/j linear coefficient"""
    d0: float
    """float: Leading quadratic coefficient"""
    d1: float
    """float: 1/j quadratic coefficient"""
    d2: float
    """float: 1/j^2 quadratic coefficient"""

    def evaluate(self, j: float, tau: float) -> float:
        """n(tau) at spin quantum number j"""
        t = j * tau
        return 1.0 + t * (self.c0 + self.c1 / j) + t ** 2 * (self.d0 + self.d1 / j
                                                            + self.d2 / j ** 2)


def _weighted(f: Optional[Field], density: str) -> Optional[Field]:
    if density == 'bare':
        return f
    if f is None:
        return lambda nu, eta: w_field(nu, eta) ** -0.5
    return lambda nu, eta: f(nu, eta) * w_field(nu, eta) ** -0.5


@lru_cache(maxsize=256)
def ratio_coefficients(gamma1: float, gamma2: float, complete_ratio: bool = False,
                       density: str = 'bare', max_l: int = 6,
                       a2: float = 0.0) -> RatioCoefficients:
    """
    j independent coefficients of the semiclassical coherence ratio.

    With I(f, q) the order q of the Laplace expansion of f and U_q = I(1, q), the linear
    coefficients are

        c0 = I(a0, 0) / U0,
        c1 = -(I(a0, 0) U1 - (I(a1, 0) + I(a0, 1)) U0) / U0^2,

    the quadratic ones follow the same pattern for b0, b1 and b2 up to 1/j^2. The 1/j^2
    quadratic term as published omits I(b0, 2) / U0; ``complete_ratio`` adds it.

    Parameters
    ----------
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)
    complete_ratio : bool, default=False
        Whether to include the I(b0, 2) / U0 term
    density : str, default='bare'
        ``'bare'`` integrates against exp(j S0), ``'stirling'`` against w^(-1/2) exp(j S0), the
        continuum limit of the exact initial block including its slowly varying prefactor
    max_l : int, default=6
        Largest power of L used by the expansions
    a2 : float, default=0.0
        Second order coefficient of a inside b2. It multiplies a0, which vanishes at the maximum
        of the action for slow pairs.

    Returns
    -------
    :py:class:`RatioCoefficients`
        Coefficients c0, c1, d0, d1, d2
    """
    if density not in DENSITIES:
        raise ValueError(f"Unknown density '{density}', choose from {DENSITIES}")
    engine = LaplaceEngine(gamma1, gamma2, max_l)
    norm = engine.expand(_weighted(None, density)).orders
    fields = dict(COEFFICIENT_FIELDS, b2=lambda nu, eta: b2_field(nu, eta, a2))
    orders = {name: engine.expand(_weighted(field, density)).orders
              for name, field in fields.items()}
    u0, u1, u2 = norm
    a0, a1, b0, b1, b2 = (orders[name] for name in ('a0', 'a1', 'b0', 'b1', 'b2'))

    c0 = a0[0] / u0
    c1 = -(a0[0] * u1 - (a1[0] + a0[1]) * u0) / u0 ** 2
    d0 = b0[0] / u0
    d1 = -(b0[0] * u1 - (b1[0] + b0[1]) * u0) / u0 ** 2
    d2 = -(-(b2[0] + b1[1]) * u0 ** 2 + (b0[0] * u2 + u1 * b1[0] + u1 * b0[1]) * u0
           - b0[0] * u1 ** 2) / u0 ** 3
    if complete_ratio:
        d2 += b0[2] / u0
    logger.debug('Ratio coefficients for (%g, %g): c0=%.6g c1=%.6g d0=%.6g d1=%.6g d2=%.6g',
                 gamma1, gamma2, c0, c1, d0, d1, d2)
    return RatioCoefficients(c0, c1, d0, d1, d2)


def n_ratio_semiclassical(gamma1: float, gamma2: float, j: float, tau: float,
                          complete_ratio: bool = False, density: str = 'bare',
                          a2: float = 0.0) -> float:
    """
    Semiclassical coherence ratio n(tau) to second order in the rescaled time j tau.

    Parameters
    ----------
    gamma1 : float
        First coherent state label (positive, finite)
    gamma2 : float
        Second coherent state label (positive, finite)
    j : float
        Spin quantum number
    tau : float
        Dimensionless time (j tau <= 0.3)
    complete_ratio : bool, default=False
        Whether to include the I(b0, 2) / U0 term (see :py:func:`ratio_coefficients`)
    density : str, default='bare'
        Continuum model of the initial block
    a2 : float, default=0.0
        Second order coefficient of a inside b2

    Returns
    -------
    float
        n(tau)

    Raises
    ------
    WrongRegime
        If j tau exceeds :py:data:`EXPANSION_REGIME`
    BoundarySaddle
        If the maximum of the action lies on the boundary
    """
    if tau < 0.0:
        raise ValueError(f"Time must be non-negative, got '{tau}'")
    if j * tau > EXPANSION_REGIME:
        raise WrongRegime(f"Short time expansion needs j tau <= {EXPANSION_REGIME}, "
                          f"got {j * tau:g}")
    if tau == 0.0:
        return 1.0
    coefficients = ratio_coefficients(float(gamma1), float(gamma2), complete_ratio, density,
                                      a2=float(a2))
    return coefficients.evaluate(j, tau)
