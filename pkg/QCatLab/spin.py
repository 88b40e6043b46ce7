"""
Hilbert space bookkeeping for a single spin j.

Basis states |j m> are stored in descending order m = j, j-1, ..., -j. Array index ``i`` therefore
corresponds to m = j - i, and all index arithmetic is done with twice-integer values (``twice_j``,
``twice_m``) so that half-integer spins are exact.

Rotation conventions
--------------------
:py:func:`rotate_y` applies exp(-i angle J_y) with J_y = (J+ - J-) / 2i. With this choice
``rotate_y(|j j>, pi/2)`` equals the coherent state at theta = pi/2, phi = 0. A rotation about an
arbitrary axis in the equatorial plane (azimuth ``axis_phi``) is built as
R_z(axis_phi - pi/2) R_y(angle) R_z(pi/2 - axis_phi), so ``axis_phi = pi/2`` is the y axis.
"""
import math
import cmath
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import expm
from scipy.special import xlogy

from QCatLab.errors import DegenerateCat, DimensionMismatch
from QCatLab.util import g_twice, log_binomial, read_only


@dataclass(frozen=True)
class SpinQuantum:
    """
    Spin quantum number j stored as the integer 2j.

    The number of atoms N of a collective Bloch vector equals ``twice_j``.

    Examples
    --------
    .. code-block:: python

        spin = SpinQuantum(20)          # j = 10, 21 basis states
        spin = SpinQuantum.from_j(2.5)  # j = 5/2

    Attributes
    ----------
    twice_j : int
        Twice the spin quantum number (at least 1)
    """

    twice_j: int

    def __post_init__(self):
        if isinstance(self.twice_j, bool) or not isinstance(self.twice_j, (int, np.integer)):
            raise TypeError(f"twice_j must be an integer, not '{type(self.twice_j).__name__}'")
        if self.twice_j < 1:
            raise ValueError(f"twice_j must be at least 1, got '{self.twice_j}'")
        object.__setattr__(self, 'twice_j', int(self.twice_j))

    @classmethod
    def from_j(cls, j: float) -> 'SpinQuantum':
        """
        Create a spin from its (integer or half-integer) quantum number.

        Parameters
        ----------
        j : float
            Spin quantum number

        Returns
        -------
        :py:class:`SpinQuantum`
            Spin with ``twice_j = 2j``

        Raises
        ------
        ValueError
            If 2j is not an integer
        """
        twice = 2.0 * j
        if abs(twice - round(twice)) > 1e-12:
            raise ValueError(f"Spin quantum number '{j}' is not a multiple of 1/2")
        return cls(int(round(twice)))

    @property
    def j(self) -> float:
        """Spin quantum number j"""
        return self.twice_j / 2.0

    @property
    def dim(self) -> int:
        """Hilbert space dimension 2j + 1"""
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        """Whether j is an integer"""
        return self.twice_j % 2 == 0

    @property
    def twice_m(self) -> np.ndarray:
        """Twice the magnetic quantum numbers in storage order (descending)"""
        return np.arange(self.twice_j, -self.twice_j - 1, -2)

    def __str__(self) -> str:
        if self.is_integer:
            return f'j={self.twice_j // 2}'
        return f'j={self.twice_j}/2'


@dataclass(frozen=True)
class CoherentLabel:
    """
    Point on the Bloch sphere labelling a spin coherent state.

    The canonical representation is the pair (theta, phi). The complex label
    gamma = tan(theta/2) exp(i phi) is a derived view; the south pole theta = pi maps to
    ``math.inf``. Azimuths are wrapped into [0, 2pi) and are set to 0 on the poles.

    Attributes
    ----------
    theta : float
        Polar angle in [0, pi]
    phi : float
        Azimuth in [0, 2pi)
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not math.isfinite(theta) or not math.isfinite(phi):
            raise ValueError(f"Label angles must be finite, got '({theta}, {phi})'")
        if theta < 0.0 or theta > math.pi:
            raise ValueError(f"Polar angle '{theta}' outside of [0, pi]")
        phi = math.fmod(phi, 2.0 * math.pi)
        if phi < 0.0:
            phi += 2.0 * math.pi
        if phi >= 2.0 * math.pi:
            phi = 0.0
        if theta in (0.0, math.pi):
            phi = 0.0
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'phi', phi)

    @classmethod
    def from_gamma(cls, gamma: Union[complex, float]) -> 'CoherentLabel':
        """
        Create a label from the complex coordinate gamma.

        Parameters
        ----------
        gamma : complex or float
            Complex label; any infinite value selects the south pole

        Returns
        -------
        :py:class:`CoherentLabel`
            Label with theta = 2 arctan|gamma| and phi = arg(gamma)
        """
        gamma = complex(gamma)
        if cmath.isinf(gamma):
            return cls(math.pi, 0.0)
        if cmath.isnan(gamma):
            raise ValueError('Complex label is NaN')
        return cls(2.0 * math.atan(abs(gamma)), cmath.phase(gamma) if gamma != 0 else 0.0)

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> 'CoherentLabel':
        """
        Create a label from angles in degrees.

        Parameters
        ----------
        theta_deg : float
            Polar angle in degrees
        phi_deg : float, default=0.0
            Azimuth in degrees

        Returns
        -------
        :py:class:`CoherentLabel`
            Label at the given angles
        """
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> 'CoherentLabel':
        """
        Create a label from unconstrained angles by folding theta back into [0, pi].

        Used by optimisers that move freely in angle space.

        Parameters
        ----------
        theta : float
            Polar angle (any real value)
        phi : float
            Azimuth (any real value)

        Returns
        -------
        :py:class:`CoherentLabel`
            Label of the same point on the sphere
        """
        theta = math.fmod(theta, 2.0 * math.pi)
        if theta < 0.0:
            theta = -theta
            phi += math.pi
        if theta > math.pi:
            theta = 2.0 * math.pi - theta
            phi += math.pi
        return cls(theta, phi)

    @property
    def gamma(self) -> Union[complex, float]:
        """Complex label tan(theta/2) exp(i phi), or ``math.inf`` on the south pole"""
        if self.is_south:
            return math.inf
        return math.tan(self.theta / 2.0) * cmath.exp(1j * self.phi)

    @property
    def is_north(self) -> bool:
        """Whether the label is the north pole |j j> (gamma = 0)"""
        return self.theta == 0.0

    @property
    def is_south(self) -> bool:
        """Whether the label is the south pole |j -j> (gamma = infinity)"""
        return self.theta == math.pi

    @property
    def direction(self) -> np.ndarray:
        """Unit vector on the Bloch sphere"""
        return np.array([math.sin(self.theta) * math.cos(self.phi),
                         math.sin(self.theta) * math.sin(self.phi),
                         math.cos(self.theta)])

    def half_angles(self) -> tuple[float, float]:
        """
        Get cos(theta/2) and sin(theta/2) with exact zeros on the poles.

        Returns
        -------
        tuple[float, float]
            (cos(theta/2), sin(theta/2))
        """
        if self.is_south:
            return 0.0, 1.0
        if self.is_north:
            return 1.0, 0.0
        return math.cos(self.theta / 2.0), math.sin(self.theta / 2.0)

    def distance(self, other: 'CoherentLabel') -> float:
        """
        Great-circle angle between two labels.

        Parameters
        ----------
        other : :py:class:`CoherentLabel`
            Label to compare with

        Returns
        -------
        float
            Angle in [0, pi]
        """
        cosine = float(np.clip(np.dot(self.direction, other.direction), -1.0, 1.0))
        return math.acos(cosine)

    def antipode(self) -> 'CoherentLabel':
        """Label of the opposite point on the sphere"""
        return CoherentLabel(math.pi - self.theta, self.phi + math.pi)

    def get_state(self) -> dict:
        """
        Get the label as a (JSON-safe) dictionary in degrees.

        Returns
        -------
        dict
            Dictionary with ``theta_deg`` and ``phi_deg``
        """
        return {'theta_deg': math.degrees(self.theta), 'phi_deg': math.degrees(self.phi)}

    def __str__(self) -> str:
        return f'({self.theta:.6g}, {self.phi:.6g})'


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Pure state of a spin in the |j m> basis (descending m).

    Amplitudes are copied and frozen on construction.

    Attributes
    ----------
    spin : :py:class:`SpinQuantum`
        Spin the state belongs to
    amplitudes : numpy.ndarray
        Complex amplitudes indexed by j - m
    """

    spin: SpinQuantum
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.spin.dim,):
            raise DimensionMismatch(f"Expected {self.spin.dim} amplitudes for {self.spin}, "
                                    f"got shape '{amplitudes.shape}'")
        object.__setattr__(self, 'amplitudes', read_only(amplitudes))

    @classmethod
    def basis(cls, spin: SpinQuantum, twice_m: int) -> 'StateVector':
        """
        Create the basis state |j m>.

        Parameters
        ----------
        spin : :py:class:`SpinQuantum`
            Spin of the state
        twice_m : int
            Twice the magnetic quantum number

        Returns
        -------
        :py:class:`StateVector`
            Basis state
        """
        if abs(twice_m) > spin.twice_j or (spin.twice_j - twice_m) % 2:
            raise ValueError(f"Magnetic index '{twice_m}/2' is not valid for {spin}")
        amplitudes = np.zeros(spin.dim, dtype=complex)
        amplitudes[(spin.twice_j - twice_m) // 2] = 1.0
        return cls(spin, amplitudes)

    def norm(self) -> float:
        """Euclidean norm of the amplitude vector"""
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> 'StateVector':
        """State scaled to unit norm"""
        return StateVector(self.spin, self.amplitudes / self.norm())

    def inner(self, other: 'StateVector') -> complex:
        """
        Inner product <self|other>.

        Parameters
        ----------
        other : :py:class:`StateVector`
            Ket of the inner product

        Returns
        -------
        complex
            <self|other>

        Raises
        ------
        DimensionMismatch
            If the states belong to different spins
        """
        if other.spin != self.spin:
            raise DimensionMismatch(f"Cannot combine states of {self.spin} and {other.spin}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Operator on the spin Hilbert space, indexed by (m1, m2) in storage order.

    Off-diagonal cat blocks |a><b| are valid instances; Hermiticity is not required.

    Attributes
    ----------
    spin : :py:class:`SpinQuantum`
        Spin the operator acts on
    entries : numpy.ndarray
        Complex (dim x dim) matrix
    """

    spin: SpinQuantum
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.spin.dim, self.spin.dim):
            raise DimensionMismatch(f"Expected a {self.spin.dim}x{self.spin.dim} matrix for "
                                    f"{self.spin}, got shape '{entries.shape}'")
        object.__setattr__(self, 'entries', read_only(entries))

    @classmethod
    def from_outer(cls, ket: StateVector, bra: StateVector) -> 'DensityMatrix':
        """
        Create the operator |ket><bra|.

        Parameters
        ----------
        ket : :py:class:`StateVector`
            Left state
        bra : :py:class:`StateVector`
            Right state (conjugated)

        Returns
        -------
        :py:class:`DensityMatrix`
            Outer product
        """
        if ket.spin != bra.spin:
            raise DimensionMismatch(f"Cannot combine states of {ket.spin} and {bra.spin}")
        return cls(ket.spin, np.outer(ket.amplitudes, bra.amplitudes.conj()))

    @classmethod
    def pure(cls, state: StateVector) -> 'DensityMatrix':
        """Projector |state><state|"""
        return cls.from_outer(state, state)

    def trace(self) -> complex:
        """Trace of the operator"""
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Whether the matrix equals its conjugate transpose within ``tol``"""
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)


def coherent_magnitudes(spin: SpinQuantum, thetas: np.ndarray) -> np.ndarray:
    """
    Moduli of the coherent state amplitudes for an array of polar angles.

    Row ``r`` holds cos^(2j-i)(theta_r/2) sin^i(theta_r/2) sqrt(C(2j, i)) for i = j - m, evaluated
    in log space.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin of the states
    thetas : numpy.ndarray
        Polar angles in [0, pi]

    Returns
    -------
    numpy.ndarray
        Array of shape (len(thetas), dim)
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    cos_half = np.where(thetas == np.pi, 0.0, np.cos(thetas / 2.0))
    sin_half = np.sin(thetas / 2.0)
    index = np.arange(spin.dim, dtype=float)
    log_mag = (xlogy(spin.twice_j - index, cos_half[:, None]) + xlogy(index, sin_half[:, None])
               + 0.5 * log_binomial(spin.twice_j, index)[None, :])
    return np.exp(log_mag)


def coherent_state(spin: SpinQuantum, label: CoherentLabel) -> StateVector:
    """
    Spin coherent state |gamma> in the |j m> basis.

    The amplitudes are (1 + |gamma|^2)^(-j) gamma^(j-m) sqrt(C(2j, j-m)), written in half-angle
    form so that both poles are exact basis states.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin of the state
    label : :py:class:`CoherentLabel`
        Point on the Bloch sphere

    Returns
    -------
    :py:class:`StateVector`
        Normalized coherent state
    """
    magnitudes = coherent_magnitudes(spin, np.array([label.theta]))[0]
    phases = np.exp(1j * label.phi * np.arange(spin.dim))
    return StateVector(spin, magnitudes * phases)


def coherent_overlap(spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel) -> complex:
    """
    Closed-form overlap <gamma1|gamma2> of two coherent states.

    Uses (cos(t1/2) cos(t2/2) + sin(t1/2) sin(t2/2) exp(i(phi2 - phi1)))^(2j), which stays finite
    at the south pole.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin of the states
    label1 : :py:class:`CoherentLabel`
        Label of the bra
    label2 : :py:class:`CoherentLabel`
        Label of the ket

    Returns
    -------
    complex
        Overlap
    """
    cos1, sin1 = label1.half_angles()
    cos2, sin2 = label2.half_angles()
    base = cos1 * cos2 + sin1 * sin2 * cmath.exp(1j * (label2.phi - label1.phi))
    return complex(base ** spin.twice_j)


def cat_state(spin: SpinQuantum, label1: CoherentLabel, label2: CoherentLabel) -> StateVector:
    """
    Normalized superposition N(|gamma1> + |gamma2>).

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin of the state
    label1 : :py:class:`CoherentLabel`
        First component
    label2 : :py:class:`CoherentLabel`
        Second component

    Returns
    -------
    :py:class:`StateVector`
        Cat state with N = (2 + 2 Re<gamma1|gamma2>)^(-1/2)

    Raises
    ------
    DegenerateCat
        If the components cancel
    """
    norm_squared = 2.0 + 2.0 * coherent_overlap(spin, label1, label2).real
    if norm_squared < 1e-14:
        raise DegenerateCat(f"Components '{label1}' and '{label2}' cancel each other")
    amplitudes = (coherent_state(spin, label1).amplitudes
                  + coherent_state(spin, label2).amplitudes) / math.sqrt(norm_squared)
    return StateVector(spin, amplitudes)


@lru_cache(maxsize=64)
def ladder_matrices(spin: SpinQuantum) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Dense matrices of J+, J- and J_z in storage order.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin to build the matrices for

    Returns
    -------
    tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray]
        Read-only (J+, J-, J_z)
    """
    twice_m = spin.twice_m
    j_minus = np.diag(np.sqrt(g_twice(spin.twice_j, twice_m[1:] + 2)), k=-1)
    j_plus = j_minus.T.copy()
    j_z = np.diag(twice_m / 2.0)
    return read_only(j_plus), read_only(j_minus), read_only(j_z)


def apply_jminus(state: StateVector) -> np.ndarray:
    """
    Apply the lowering operator: (J- psi)_m = sqrt(g_(m+1)) psi_(m+1).

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to act on

    Returns
    -------
    numpy.ndarray
        Unnormalized amplitudes of J- psi
    """
    spin = state.spin
    out = np.zeros(spin.dim, dtype=complex)
    out[1:] = np.sqrt(g_twice(spin.twice_j, spin.twice_m[1:] + 2)) * state.amplitudes[:-1]
    return out


def apply_jplus(state: StateVector) -> np.ndarray:
    """
    Apply the raising operator: (J+ psi)_m = sqrt(g_m) psi_(m-1).

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to act on

    Returns
    -------
    numpy.ndarray
        Unnormalized amplitudes of J+ psi
    """
    spin = state.spin
    out = np.zeros(spin.dim, dtype=complex)
    out[:-1] = np.sqrt(g_twice(spin.twice_j, spin.twice_m[:-1])) * state.amplitudes[1:]
    return out


def apply_jz(state: StateVector) -> np.ndarray:
    """Apply J_z (unnormalized amplitudes)"""
    return state.spin.twice_m / 2.0 * state.amplitudes


def pointer_deviation(spin: SpinQuantum, label: CoherentLabel) -> float:
    """
    Sine of the angle between J-|gamma> and |gamma>.

    Equals sqrt(1 - |<gamma|J-|gamma>|^2 / <gamma|J+J-|gamma>). The dark state (theta = pi) is
    annihilated by J- and returns 0.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin of the state
    label : :py:class:`CoherentLabel`
        Coherent state label

    Returns
    -------
    float
        Deviation in [0, 1]
    """
    state = coherent_state(spin, label)
    lowered = apply_jminus(state)
    norm_squared = float(np.vdot(lowered, lowered).real)
    if norm_squared < 1e-300:
        return 0.0
    projection = abs(np.vdot(state.amplitudes, lowered)) ** 2
    return math.sqrt(max(1.0 - projection / norm_squared, 0.0))


@lru_cache(maxsize=256)
def _small_d(spin: SpinQuantum, beta: float) -> np.ndarray:
    j_plus, j_minus, _ = ladder_matrices(spin)
    return read_only(expm(beta * (j_minus - j_plus) / 2.0))


def wigner_small_d(spin: SpinQuantum, beta: float) -> np.ndarray:
    """
    Real rotation matrix exp(-i beta J_y) in storage order.

    Parameters
    ----------
    spin : :py:class:`SpinQuantum`
        Spin to build the matrix for
    beta : float
        Rotation angle

    Returns
    -------
    numpy.ndarray
        Read-only real (dim x dim) matrix
    """
    return _small_d(spin, float(beta))


def rotate_y(state: StateVector, angle: float) -> StateVector:
    """
    Rotate a state about the y axis.

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to rotate
    angle : float
        Rotation angle (any real value)

    Returns
    -------
    :py:class:`StateVector`
        exp(-i angle J_y) |state>
    """
    return StateVector(state.spin, wigner_small_d(state.spin, angle) @ state.amplitudes)


def rotate_z(state: StateVector, angle: float) -> StateVector:
    """
    Rotate a state about the z axis; a coherent state at phi moves to phi + angle.

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to rotate
    angle : float
        Rotation angle

    Returns
    -------
    :py:class:`StateVector`
        exp(-i angle J_z) |state>
    """
    phases = np.exp(-0.5j * angle * state.spin.twice_m)
    return StateVector(state.spin, phases * state.amplitudes)


def rotate(state: StateVector, angle: float, axis_phi: float) -> StateVector:
    """
    Rotate a state about an axis in the equatorial plane.

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to rotate
    angle : float
        Rotation angle
    axis_phi : float
        Azimuth of the rotation axis (pi/2 is the y axis, 0 the x axis)

    Returns
    -------
    :py:class:`StateVector`
        Rotated state
    """
    offset = axis_phi - math.pi / 2.0
    return rotate_z(rotate_y(rotate_z(state, -offset), angle), offset)


def bloch_vector(state: StateVector) -> np.ndarray:
    """
    Expectation value <J> / j of a normalized state.

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to evaluate

    Returns
    -------
    numpy.ndarray
        (x, y, z) components
    """
    lowered = complex(np.vdot(state.amplitudes, apply_jminus(state)))
    z_value = float(np.vdot(state.amplitudes, apply_jz(state)).real)
    return np.array([lowered.real, -lowered.imag, z_value]) / state.spin.j


def husimi_q(state: StateVector, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """
    Husimi function Q(theta, phi) = |<theta, phi|psi>|^2 on a grid.

    Parameters
    ----------
    state : :py:class:`StateVector`
        State to evaluate
    thetas : numpy.ndarray
        Polar angles (rows of the result)
    phis : numpy.ndarray
        Azimuths (columns of the result)

    Returns
    -------
    numpy.ndarray
        Array of shape (len(thetas), len(phis))
    """
    magnitudes = coherent_magnitudes(state.spin, thetas)
    weighted = magnitudes * state.amplitudes[None, :]
    phase = np.exp(-1j * np.outer(np.arange(state.spin.dim), np.asarray(phis, dtype=float)))
    return np.abs(weighted @ phase) ** 2
