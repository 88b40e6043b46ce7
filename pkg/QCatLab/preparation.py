"""
Preparation of cat states that are symmetric about the equator.

The pipeline starts in the ground state |j, -j>, rotates it to a coherent state at polar angle
``theta_offset``, splits it into two coherent components with the one-axis twisting phase
exp(-i chi J+J-) at chi = pi/2, and finally rotates the pair by pi/2 about the normal of the plane
that contains both components. For integer j the result is the cat
|pi/2 - theta_offset, phi> + exp(i alpha) |pi/2 + theta_offset, phi>, whose components satisfy
gamma1 gamma2* = 1.

All steps are unitary; the structure of intermediate states is verified numerically with a two
component fit.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from QCatLab.errors import HalfIntegerSpin, PipelineFidelityLow
from QCatLab.spin import (CoherentLabel, SpinQuantum, StateVector, bloch_vector, coherent_overlap,
                          coherent_state, husimi_q, rotate)
from QCatLab.util import g_twice


logger = logging.getLogger(__name__)

FIT_FIDELITY_THRESHOLD = 0.999
"""float: Smallest two component fidelity accepted for a prepared state"""

LABEL_TOLERANCE = 1e-6
"""float: Tolerance on the angles of a symmetric pair of components"""

SPLIT_CHI = math.pi / 2.0
"""float: Twisting phase that splits a coherent state into two components (integer j)"""


def fidelity(a: StateVector, b: StateVector) -> float:
    """
    Fidelity |<a|b>|^2 of two states (normalized on the fly).

    Parameters
    ----------
    a : :py:class:`~QCatLab.spin.StateVector`
        First state
    b : :py:class:`~QCatLab.spin.StateVector`
        Second state

    Returns
    -------
    float
        Fidelity in [0, 1]

    Raises
    ------
    DimensionMismatch
        If the states belong to different spins
    """
    overlap = abs(a.inner(b)) ** 2 / (a.norm() ** 2 * b.norm() ** 2)
    return float(min(max(overlap, 0.0), 1.0))


def twist_evolve(state: StateVector, chi: float) -> StateVector:
    """
    Apply the one-axis twisting unitary exp(-i chi J+J-).

    Parameters
    ----------
    state : :py:class:`~QCatLab.spin.StateVector`
        State to evolve
    chi : float
        Accumulated twisting phase

    Returns
    -------
    :py:class:`~QCatLab.spin.StateVector`
        Twisted state
    """
    spin = state.spin
    phases = np.exp(-1j * chi * g_twice(spin.twice_j, spin.twice_m))
    return StateVector(spin, phases * state.amplitudes)


def rotate_pulse(state: StateVector, axis_phi: float, angle: float) -> StateVector:
    """
    Resonant pulse: rotation by ``angle`` about the equatorial axis at azimuth ``axis_phi``.

    Parameters
    ----------
    state : :py:class:`~QCatLab.spin.StateVector`
        State to rotate
    axis_phi : float
        Azimuth of the rotation axis
    angle : float
        Rotation angle

    Returns
    -------
    :py:class:`~QCatLab.spin.StateVector`
        Rotated state
    """
    return rotate(state, angle, axis_phi)


@dataclass(frozen=True)
class TwistSchedule:
    """
    Twisting phase followed by an ordered list of pulses.

    Attributes
    ----------
    chi : float
        Accumulated twisting phase (non-negative)
    pulses : tuple[tuple[float, float], ...]
        Pulses as (axis azimuth, rotation angle), applied in order after the twist
    """

    chi: float
    pulses: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.chi) or self.chi < 0.0:
            raise ValueError(f"Twisting phase must be finite and non-negative, got '{self.chi}'")
        object.__setattr__(self, 'pulses', tuple((float(axis), float(angle))
                                                 for axis, angle in self.pulses))

    def apply(self, state: StateVector) -> StateVector:
        """
        Twist the state, then apply the pulses in order.

        Parameters
        ----------
        state : :py:class:`~QCatLab.spin.StateVector`
            Input state

        Returns
        -------
        :py:class:`~QCatLab.spin.StateVector`
            Output state
        """
        state = twist_evolve(state, self.chi)
        for axis_phi, angle in self.pulses:
            state = rotate_pulse(state, axis_phi, angle)
        return state

    def get_state(self) -> dict:
        """JSON-safe representation"""
        return {'chi': self.chi, 'pulses': [list(pulse) for pulse in self.pulses]}


@dataclass(frozen=True, eq=False)
class TwoComponentFit:
    """
    Best approximation of a state by a superposition of two coherent states.

    Attributes
    ----------
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        Component with the smaller polar angle
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Other component
    weights : tuple[complex, complex]
        Expansion coefficients of the state in the two (non-orthogonal) components
    fidelity : float
        Fidelity of the state with its projection onto the two components
    """

    label1: CoherentLabel
    label2: CoherentLabel
    weights: tuple[complex, complex]
    fidelity: float

    @property
    def relative_phase(self) -> float:
        """Phase of weights[1] / weights[0]"""
        return cmath.phase(self.weights[1] / self.weights[0]) if self.weights[0] else 0.0

    def get_state(self) -> dict:
        """JSON-safe representation"""
        return {'label1': self.label1.get_state(), 'label2': self.label2.get_state(),
                'weights': [[weight.real, weight.imag] for weight in self.weights],
                'fidelity': self.fidelity}


def _projection(state: StateVector, label1: CoherentLabel,
                label2: CoherentLabel) -> tuple[float, np.ndarray]:
    """Fidelity of ``state`` with its projection onto span{|label1>, |label2>} and the weights"""
    spin = state.spin
    components = (coherent_state(spin, label1), coherent_state(spin, label2))
    overlap = coherent_overlap(spin, label1, label2)
    gram = np.array([[1.0, overlap], [overlap.conjugate(), 1.0]])
    projections = np.array([component.inner(state) for component in components])
    weights = np.linalg.pinv(gram) @ projections
    value = float(np.vdot(projections, weights).real) / state.norm() ** 2
    return value, weights


def _grid_seeds(state: StateVector) -> tuple[tuple[float, float], tuple[float, float]]:
    """Two starting labels from the Husimi function"""
    thetas = np.linspace(0.0, math.pi, 65)
    phis = np.linspace(0.0, 2.0 * math.pi, 128, endpoint=False)
    q_values = husimi_q(state, thetas, phis)
    first = np.unravel_index(np.argmax(q_values), q_values.shape)
    seed = CoherentLabel(thetas[first[0]], phis[first[1]])

    # Suppress the neighbourhood of the first maximum by the overlap with its coherent state
    directions = np.stack([np.outer(np.sin(thetas), np.cos(phis)),
                           np.outer(np.sin(thetas), np.sin(phis)),
                           np.repeat(np.cos(thetas)[:, None], len(phis), axis=1)], axis=-1)
    cosine = np.clip(directions @ seed.direction, -1.0, 1.0)
    overlap = ((1.0 + cosine) / 2.0) ** state.spin.twice_j
    second = np.unravel_index(np.argmax(q_values * (1.0 - overlap)), q_values.shape)
    return (thetas[first[0]], phis[first[1]]), (thetas[second[0]], phis[second[1]])


def fit_two_component(state: StateVector) -> TwoComponentFit:
    """
    Fit a superposition of two coherent states to a state.

    Starting points come from the two largest separated maxima of the Husimi function; the four
    angles are then refined with a Nelder-Mead search on log(1 - fidelity).

    Examples
    --------
    .. code-block:: python

        # Split a coherent state on the equator and recover the two components
        spin = SpinQuantum.from_j(10)
        state = twist_evolve(coherent_state(spin, CoherentLabel(math.pi / 2)), math.pi / 2)
        fit = fit_two_component(state)

    Parameters
    ----------
    state : :py:class:`~QCatLab.spin.StateVector`
        State to decompose

    Returns
    -------
    :py:class:`TwoComponentFit`
        Fitted components sorted by polar angle
    """
    seed1, seed2 = _grid_seeds(state)

    def _objective(angles: np.ndarray) -> float:
        label1 = CoherentLabel.from_angles(angles[0], angles[1])
        label2 = CoherentLabel.from_angles(angles[2], angles[3])
        value, _ = _projection(state, label1, label2)
        return math.log(max(1.0 - value, 1e-18))

    start = np.array([*seed1, *seed2])
    simplex = np.vstack([start, start + 0.05 * np.eye(4)])
    result = minimize(_objective, start, method='Nelder-Mead',
                      options={'initial_simplex': simplex, 'xatol': 1e-10, 'fatol': 1e-12,
                               'maxiter': 8000, 'maxfev': 16000})
    labels = [CoherentLabel.from_angles(result.x[0], result.x[1]),
              CoherentLabel.from_angles(result.x[2], result.x[3])]
    value, weights = _projection(state, *labels)
    order = sorted(range(2), key=lambda index: (labels[index].theta, labels[index].phi))
    fit = TwoComponentFit(labels[order[0]], labels[order[1]],
                          (complex(weights[order[0]]), complex(weights[order[1]])),
                          min(value, 1.0))
    logger.debug('Two component fit of %s: %s, %s with fidelity %.12f', state.spin, fit.label1,
                 fit.label2, fit.fidelity)
    return fit


def ideal_cat_fidelity(state: StateVector, label1: CoherentLabel,
                       label2: CoherentLabel) -> tuple[float, float]:
    """
    Fidelity with the equal weight cat |label1> + exp(i alpha) |label2>, maximised over alpha.

    Parameters
    ----------
    state : :py:class:`~QCatLab.spin.StateVector`
        State to compare
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First component
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second component

    Returns
    -------
    tuple[float, float]
        Best fidelity and the relative phase alpha in [0, 2pi) where it is reached
    """
    spin = state.spin
    first = coherent_state(spin, label1).inner(state)
    second = coherent_state(spin, label2).inner(state)
    overlap = coherent_overlap(spin, label1, label2)
    norm_squared = state.norm() ** 2

    def _fidelity(alpha: float) -> float:
        phase = cmath.exp(1j * alpha)
        cat_norm = 2.0 + 2.0 * (phase * overlap).real
        if cat_norm < 1e-14:
            return 0.0
        return abs(first + phase.conjugate() * second) ** 2 / (cat_norm * norm_squared)

    alphas = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    best = alphas[int(np.argmax([_fidelity(alpha) for alpha in alphas]))]
    spacing = alphas[1] - alphas[0]
    result = minimize_scalar(lambda alpha: -_fidelity(alpha), bounds=(best - spacing, best + spacing),
                             method='bounded', options={'xatol': 1e-10})
    return float(min(-result.fun, 1.0)), float(result.x % (2.0 * math.pi))


@dataclass(frozen=True, eq=False)
class PreparationResult:
    """
    Outcome of the preparation pipeline.

    Attributes
    ----------
    state : :py:class:`~QCatLab.spin.StateVector`
        Prepared state
    initial_pulse : tuple[float, float]
        Pulse (axis azimuth, angle) taking the ground state to the coherent state
    schedule : :py:class:`TwistSchedule`
        Twist and final pulse
    fit : :py:class:`TwoComponentFit`
        Two component fit of the prepared state
    symmetric : bool
        Whether the fitted components satisfy theta1 + theta2 = pi with equal azimuths
    ideal_fidelity : float
        Fidelity with the ideal symmetric cat at theta = pi/2 -+ theta_offset
    relative_phase : float
        Relative phase of the ideal cat that maximises the fidelity
    twist_phi : float
        Azimuth of the first component after twisting
    theta_offset : float
        Requested distance of the components from the equator
    """

    state: StateVector
    initial_pulse: tuple[float, float]
    schedule: TwistSchedule
    fit: TwoComponentFit
    symmetric: bool
    ideal_fidelity: float
    relative_phase: float
    twist_phi: float
    theta_offset: float = field(default=math.pi / 4.0)

    def get_state(self) -> dict:
        """JSON-safe summary (without the amplitudes)"""
        return {
            'twice_j': self.state.spin.twice_j,
            'theta_offset': self.theta_offset,
            'initial_pulse': list(self.initial_pulse),
            'schedule': self.schedule.get_state(),
            'fit': self.fit.get_state(),
            'symmetric': self.symmetric,
            'ideal_fidelity': self.ideal_fidelity,
            'relative_phase': self.relative_phase,
            'twist_phi': self.twist_phi
        }


def is_symmetric_pair(label1: CoherentLabel, label2: CoherentLabel,
                      tol: float = LABEL_TOLERANCE) -> bool:
    """
    Whether two labels lie symmetric about the equator (gamma1 gamma2* = 1).

    Parameters
    ----------
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First label
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second label
    tol : float, default=1e-6
        Tolerance on the angles

    Returns
    -------
    bool
        True if theta1 + theta2 = pi and phi1 = phi2 within ``tol``
    """
    phase_gap = abs(cmath.phase(cmath.exp(1j * (label1.phi - label2.phi))))
    return abs(label1.theta + label2.theta - math.pi) < tol and phase_gap < tol


def prepare_symmetric_cat(spin: SpinQuantum, theta_offset: float = math.pi / 4.0,
                          axis_offset: float = 0.0, chi: float = SPLIT_CHI,
                          ground: Optional[StateVector] = None) -> PreparationResult:
    """
    Run the preparation pipeline.

    Parameters
    ----------
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin with integer j
    theta_offset : float, default=pi/4
        Polar angle of the coherent state before twisting (0 < theta_offset < pi/2); the final
        components sit at pi/2 -+ theta_offset
    axis_offset : float, default=0.0
        Extra azimuth added to the axis of the final pulse. A nonzero value mis-rotates the pair
        and produces an asymmetric cat.
    chi : float, default=pi/2
        Twisting phase
    ground : :py:class:`~QCatLab.spin.StateVector`, optional
        Start state (defaults to |j, -j>)

    Returns
    -------
    :py:class:`PreparationResult`
        Prepared state and diagnostics

    Raises
    ------
    HalfIntegerSpin
        If j is half-integer
    PipelineFidelityLow
        If the prepared state is not a two component superposition
    """
    if not spin.is_integer:
        raise HalfIntegerSpin(f"Cat preparation by twisting needs integer j, got {spin}")
    if not 0.0 < theta_offset < math.pi / 2.0:
        raise ValueError(f"Polar offset must lie in (0, pi/2), got '{theta_offset}'")
    if ground is None:
        ground = StateVector.basis(spin, -spin.twice_j)

    initial_pulse = (math.pi / 2.0, -(math.pi - theta_offset))
    coherent = rotate_pulse(ground, *initial_pulse)
    twisted = twist_evolve(coherent, chi)
    split = fit_two_component(twisted)

    # Rotate about the normal of the plane spanned by the two components
    normal = np.cross(split.label1.direction, split.label2.direction)
    axis_phi = math.atan2(normal[1], normal[0]) + axis_offset
    schedule = TwistSchedule(chi, ((axis_phi, math.pi / 2.0),))
    prepared = schedule.apply(coherent)

    fit = fit_two_component(prepared)
    if fit.fidelity < FIT_FIDELITY_THRESHOLD:
        raise PipelineFidelityLow(f"Prepared state of {spin} has two component fidelity "
                                  f"{fit.fidelity:.6f} < {FIT_FIDELITY_THRESHOLD}")
    mean_phi = math.atan2(math.sin(fit.label1.phi) + math.sin(fit.label2.phi),
                          math.cos(fit.label1.phi) + math.cos(fit.label2.phi))
    ideal_fidelity, relative_phase = ideal_cat_fidelity(
        prepared, CoherentLabel(math.pi / 2.0 - theta_offset, mean_phi),
        CoherentLabel(math.pi / 2.0 + theta_offset, mean_phi))
    symmetric = is_symmetric_pair(fit.label1, fit.label2)
    logger.info('Prepared %s cat at offset %.4g: components %s and %s, ideal fidelity %.9f',
                'symmetric' if symmetric else 'asymmetric', theta_offset, fit.label1, fit.label2,
                ideal_fidelity)
    return PreparationResult(prepared, initial_pulse, schedule, fit, symmetric, ideal_fidelity,
                             relative_phase, split.label1.phi, theta_offset)


def prepared_norm_defect(result: PreparationResult) -> float:
    """|1 - norm| of a prepared state (all pipeline steps are unitary)"""
    return abs(1.0 - result.state.norm())


def prepared_bloch_vector(result: PreparationResult) -> np.ndarray:
    """Bloch vector <J>/j of a prepared state"""
    return bloch_vector(result.state)
