"""
Coherence norms of the off-diagonal cat block and their decay rates.

The off-diagonal block of a cat N(|gamma1> + |gamma2>) is rho = |gamma1><gamma2| (up to the
normalisation of the cat). Its decoherence is measured with

- N1 = tr(rho rho^dagger), the sum of |rho_(m1 m2)|^2
- N2 = sum |rho_(m1 m2)|

and the normalized ratio n(tau) = N2(tau) / N2(0).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial

from QCatLab.dissipator import BlockDensity, liouvillian_apply
from QCatLab.engines import Engine, OracleEngine
from QCatLab.errors import InsufficientSamples
from QCatLab.spin import CoherentLabel, DensityMatrix, SpinQuantum, coherent_state
from QCatLab.util import read_only


logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-10
"""float: Allowed increase of n(tau) between samples before a curve counts as non-monotone"""


def cat_block(spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel) -> BlockDensity:
    """
    Off-diagonal block |gamma1><gamma2| of a cat state in block form.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the state
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        Ket component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Bra component

    Returns
    -------
    :py:class:`~QCatLab.dissipator.BlockDensity`
        Block density of the outer product
    """
    matrix = DensityMatrix.from_outer(coherent_state(spin, label1), coherent_state(spin, label2))
    return BlockDensity.from_matrix(matrix)


def norm_n1(rho: BlockDensity) -> float:
    """
    Squared Hilbert-Schmidt norm N1 = tr(rho rho^dagger).

    Parameters
    ----------
    rho : :py:class:`~QCatLab.dissipator.BlockDensity`
        Block density

    Returns
    -------
    float
        Sum of |rho_(m1 m2)|^2
    """
    return float(sum(np.sum(np.abs(block) ** 2) for block in rho.blocks.values()))


def norm_n2(rho: BlockDensity) -> float:
    """
    Entry-wise one norm N2.

    Parameters
    ----------
    rho : :py:class:`~QCatLab.dissipator.BlockDensity`
        Block density

    Returns
    -------
    float
        Sum of |rho_(m1 m2)|
    """
    return float(sum(np.sum(np.abs(block)) for block in rho.blocks.values()))


def n1_rate_printed(theta1: float, theta2: float, dphi: float, j: float) -> float:
    """
    Published closed form of the initial derivative of N1, evaluated as printed.

    -2j (sin^2 theta1 + sin^2 theta2 - 2 cos(dphi) sin theta1 sin theta2)
    - (1 + cos theta1)^2 (1 + cos theta2)^2

    This expression is kept for comparison only. It disagrees with the generator (for example it
    gives 0 for the polar cat, whose N1 decays as exp(-2 tau)); use :py:func:`n1_rate_oracle` or
    :py:func:`n1_rate_closed_form` for actual rates.

    Parameters
    ----------
    theta1 : float
        Polar angle of the first component
    theta2 : float
        Polar angle of the second component
    dphi : float
        Azimuth difference phi2 - phi1
    j : float
        Spin quantum number

    Returns
    -------
    float
        Printed value of dN1/dtau at tau = 0
    """
    sin1, sin2 = math.sin(theta1), math.sin(theta2)
    linear = sin1 ** 2 + sin2 ** 2 - 2.0 * math.cos(dphi) * sin1 * sin2
    return -2.0 * j * linear - (1.0 + math.cos(theta1)) ** 2 * (1.0 + math.cos(theta2)) ** 2


def n1_rate_closed_form(theta1: float, theta2: float, dphi: float, j: float) -> float:
    """
    Closed form of the initial derivative of N1 obtained from the generator.

    -j (sin^2 theta1 + sin^2 theta2 - 2 cos(dphi) sin theta1 sin theta2)
    - ((1 + cos theta1)^2 + (1 + cos theta2)^2) / 2

    Parameters
    ----------
    theta1 : float
        Polar angle of the first component
    theta2 : float
        Polar angle of the second component
    dphi : float
        Azimuth difference phi2 - phi1
    j : float
        Spin quantum number

    Returns
    -------
    float
        dN1/dtau at tau = 0
    """
    sin1, sin2 = math.sin(theta1), math.sin(theta2)
    linear = sin1 ** 2 + sin2 ** 2 - 2.0 * math.cos(dphi) * sin1 * sin2
    return -j * linear - 0.5 * ((1.0 + math.cos(theta1)) ** 2 + (1.0 + math.cos(theta2)) ** 2)


def n1_rate_oracle(spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel) -> float:
    """
    Initial derivative of N1 from the generator: 2 Re tr(L[rho] rho^dagger).

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the state
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second component

    Returns
    -------
    float
        dN1/dtau at tau = 0
    """
    rho = cat_block(spin, label1, label2)
    derivative = liouvillian_apply(rho)
    return float(2.0 * sum(np.vdot(rho.blocks[key], derivative.blocks[key]).real
                           for key in rho.blocks))


def n1_rate_finite_difference(spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel,
                              step: Optional[float] = None, engine: Optional[Engine] = None) -> float:
    """
    Initial derivative of N1 from a fourth order one-sided difference of an evolved curve.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the state
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second component
    step : float, optional
        Time step (defaults to 1e-3 / j)
    engine : :py:class:`~QCatLab.engines.Engine`, optional
        Engine used for the evolution (defaults to the oracle at tolerance 1e-13)

    Returns
    -------
    float
        Finite difference estimate of dN1/dtau at tau = 0
    """
    if step is None:
        step = 1e-3 / spin.j
    if engine is None:
        engine = OracleEngine(tol=1e-13)
    rho0 = cat_block(spin, label1, label2)
    values = [norm_n1(rho) for rho in engine.evolve_series(rho0, [i * step for i in range(5)])]
    stencil = (-25.0, 48.0, -36.0, 16.0, -3.0)
    return sum(weight * value for weight, value in zip(stencil, values)) / (12.0 * step)


@dataclass(frozen=True, eq=False)
class DecoherenceCurve:
    """
    Sampled decay of the coherence norms.

    Attributes
    ----------
    taus : numpy.ndarray
        Ascending sample times starting at 0
    n1 : numpy.ndarray
        N1 at each time
    n2 : numpy.ndarray
        N2 at each time
    n_ratio : numpy.ndarray
        N2(tau) / N2(0); the first entry is exactly 1
    meta : dict
        ``twice_j``, ``label1``, ``label2`` and ``engine`` tag
    """

    taus: np.ndarray = field(repr=False)
    n1: np.ndarray = field(repr=False)
    n2: np.ndarray = field(repr=False)
    n_ratio: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arrays = {}
        for name in ('taus', 'n1', 'n2', 'n_ratio'):
            arrays[name] = np.asarray(getattr(self, name), dtype=float)
            if arrays[name].ndim != 1 or len(arrays[name]) != len(arrays['taus']):
                raise ValueError(f"Curve field '{name}' must be a vector of "
                                 f"{len(arrays['taus'])} samples")
            object.__setattr__(self, name, read_only(arrays[name]))
        if len(self.taus) == 0:
            raise ValueError('A curve needs at least one sample')
        if np.any(np.diff(self.taus) <= 0.0):
            raise ValueError('Curve times must be strictly ascending')

    @classmethod
    def from_densities(cls, taus: Sequence[float], densities: Sequence[BlockDensity],
                       meta: dict = None) -> 'DecoherenceCurve':
        """
        Build a curve from evolved densities; the first density defines N2(0).

        Parameters
        ----------
        taus : Sequence[float]
            Sample times (the first must be 0)
        densities : Sequence[:py:class:`~QCatLab.dissipator.BlockDensity`]
            Density at each time
        meta : dict, optional
            Curve metadata

        Returns
        -------
        :py:class:`DecoherenceCurve`
            Curve with exact n_ratio[0] = 1
        """
        if len(taus) == 0 or taus[0] != 0.0:
            raise ValueError('Decoherence curves must start at tau = 0')
        n1 = np.array([norm_n1(rho) for rho in densities])
        n2 = np.array([norm_n2(rho) for rho in densities])
        if n2[0] == 0.0:
            raise ValueError('The initial block vanishes, n(tau) is undefined')
        n_ratio = n2 / n2[0]
        n_ratio[0] = 1.0
        return cls(np.asarray(taus, dtype=float), n1, n2, n_ratio, dict(meta or {}))

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        """
        Whether n(tau) never increases by more than ``slack`` between samples.

        Parameters
        ----------
        slack : float, default=1e-10
            Tolerated increase

        Returns
        -------
        bool
            True if the curve is non-increasing within ``slack``
        """
        return bool(np.all(np.diff(self.n_ratio) <= slack))

    def get_state(self) -> dict:
        """
        Get a JSON-safe representation of the curve.

        Returns
        -------
        dict
            Samples as lists plus metadata
        """
        return {
            'taus': self.taus.tolist(),
            'n1': self.n1.tolist(),
            'n2': self.n2.tolist(),
            'n_ratio': self.n_ratio.tolist(),
            'meta': dict(self.meta)
        }


def decoherence_curve(engine: Engine, spin: SpinQuantum, label1: CoherentLabel,
                      label2: CoherentLabel, taus: Sequence[float]) -> DecoherenceCurve:
    """
    Evolve the cat block |gamma1><gamma2| and record its coherence norms.

    Examples
    --------
    .. code-block:: python

        # Decay of a symmetric cat at j = 10 with the exact propagator
        spin = SpinQuantum.from_j(10)
        label1 = CoherentLabel.from_degrees(45.0)
        label2 = CoherentLabel.from_degrees(135.0)
        curve = decoherence_curve(get_engine('exact'), spin, label1, label2,
                                  np.linspace(0.0, 0.1, 11))

    Parameters
    ----------
    engine : :py:class:`~QCatLab.engines.Engine`
        Evolution engine
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the state
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second component
    taus : Sequence[float]
        Ascending sample times starting at 0

    Returns
    -------
    :py:class:`DecoherenceCurve`
        Sampled curve
    """
    taus = [float(tau) for tau in taus]
    rho0 = cat_block(spin, label1, label2)
    densities = engine.evolve_series(rho0, taus)
    meta = {'twice_j': spin.twice_j, 'label1': label1.get_state(), 'label2': label2.get_state(),
            'engine': engine.tag()}
    curve = DecoherenceCurve.from_densities(taus, densities, meta)
    if not curve.is_monotone():
        logger.warning('Coherence of %s cat (%s, %s) increases between samples (engine %s)',
                       spin, label1, label2, engine.tag())
    logger.debug('Curve for %s with %d samples up to tau=%g', spin, len(taus), taus[-1])
    return curve


def default_window(curve: DecoherenceCurve) -> float:
    """
    Default fit window min(0.05 / max(rate guess, 0.5), 0.1).

    The rate guess is the logarithmic slope between the first two samples.

    Parameters
    ----------
    curve : :py:class:`DecoherenceCurve`
        Curve to fit

    Returns
    -------
    float
        Upper end of the fit window
    """
    guess = 0.0
    if len(curve.taus) > 1 and curve.n_ratio[1] > 0.0:
        guess = -math.log(curve.n_ratio[1]) / curve.taus[1]
    return min(0.05 / max(guess, 0.5), 0.1)


def fit_initial_rate(curve: DecoherenceCurve, window_end: Optional[float] = None,
                     degree: int = 1) -> float:
    """
    Initial decay rate of n(tau) from a least squares polynomial fit of ln n(tau).

    The rate is the negative linear coefficient of the fit over [0, window_end]. The default
    (``degree=1``) is the plain least squares slope of ln n; ``degree=2`` adds a quadratic term
    that absorbs the curvature of ln n on longer windows.

    Parameters
    ----------
    curve : :py:class:`DecoherenceCurve`
        Curve to fit
    window_end : float, optional
        Upper end of the fit window (see :py:func:`default_window`)
    degree : int, default=1
        Degree of the polynomial in tau

    Returns
    -------
    float
        Decay rate (positive for a decaying curve)

    Raises
    ------
    InsufficientSamples
        If fewer than five samples lie in (0, window_end] or n(tau) is not positive there
    """
    if degree < 1:
        raise ValueError(f"Fit degree must be at least 1, got '{degree}'")
    if window_end is None:
        window_end = default_window(curve)
    inside = curve.taus <= window_end * (1.0 + 1e-12)
    if np.count_nonzero(inside & (curve.taus > 0.0)) < 5:
        raise InsufficientSamples(f"Fewer than 5 samples in the fit window (0, {window_end:g}]")
    taus, ratios = curve.taus[inside], curve.n_ratio[inside]
    if np.any(ratios <= 0.0):
        raise InsufficientSamples(f"n(tau) is not positive on the fit window (0, {window_end:g}]")

    coefficients = polynomial.polyfit(taus, np.log(ratios), degree)
    return float(-coefficients[1])


def window_rate(engine: Engine, spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel,
                window_jtau: float = 0.05, window_samples: int = 10) -> float:
    """
    Evolve a cat over the window j tau in [0, window_jtau] and fit its initial decay rate.

    Parameters
    ----------
    engine : :py:class:`~QCatLab.engines.Engine`
        Evolution engine
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the cat
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        Label of the ket component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Label of the bra component
    window_jtau : float, default=0.05
        End of the fit window in units of j tau
    window_samples : int, default=10
        Samples in (0, window]

    Returns
    -------
    float
        Fitted initial rate (see :py:func:`fit_initial_rate`)
    """
    taus = np.linspace(0.0, window_jtau / spin.j, window_samples + 1)
    curve = decoherence_curve(engine, spin, label1, label2, taus)
    return fit_initial_rate(curve, taus[-1])
