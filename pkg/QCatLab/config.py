"""
Run, scan and laboratory configuration.

Values are resolved in the order built-in defaults < JSON config file < command-line flags. All
configuration classes implement :py:class:`~QCatLab.serialise.Serializable` so that they can be
echoed into report headers and read back from config files.
"""
import json
import logging
import math
import os
from dataclasses import dataclass, field, fields
from typing import Any, Optional, Union

import numpy as np

from QCatLab.dissipator import SHORT_TIME_FORMS
from QCatLab.engines import Engine, available_engines, get_engine
from QCatLab.errors import InvalidConfig
from QCatLab.serialise import Serializable
from QCatLab.spin import CoherentLabel, SpinQuantum


logger = logging.getLogger(__name__)

WORKERS_VARIABLE = 'QCATLAB_WORKERS'
"""str: Environment variable holding the default number of scan workers"""


def default_workers() -> int:
    """
    Number of scan workers from ``QCATLAB_WORKERS`` (falls back to the CPU count).

    Returns
    -------
    int
        Worker count (at least 1)

    Raises
    ------
    InvalidConfig
        If the environment variable is not an integer
    """
    value = os.environ.get(WORKERS_VARIABLE)
    if value is None or value.strip() == '':
        return max(os.cpu_count() or 1, 1)
    try:
        return max(int(value), 1)
    except ValueError as error:
        raise InvalidConfig(f"{WORKERS_VARIABLE} must be an integer, got '{value}'") from error


def normalize_engine_name(name: str) -> str:
    """
    Map an engine name to its registry spelling ('short_time' and 'short-time' are the same).

    Parameters
    ----------
    name : str
        Engine name

    Returns
    -------
    str
        Registered engine name

    Raises
    ------
    InvalidConfig
        If no engine with this name exists
    """
    normalized = str(name).strip().lower().replace('_', '-')
    if normalized not in available_engines():
        raise InvalidConfig(f"Unknown engine '{name}', choose from {sorted(available_engines())}")
    return normalized


def parse_label(value: Union[dict, CoherentLabel]) -> CoherentLabel:
    """
    Read a coherent state label from its config representation.

    Accepted forms are ``{"theta_deg": .., "phi_deg": ..}``, ``{"gamma": x}``,
    ``{"gamma": [re, im]}`` and ``{"gamma": "inf"}``.

    Parameters
    ----------
    value : dict or :py:class:`~QCatLab.spin.CoherentLabel`
        Config value

    Returns
    -------
    :py:class:`~QCatLab.spin.CoherentLabel`
        Parsed label

    Raises
    ------
    InvalidConfig
        If the value has none of the accepted forms
    """
    if isinstance(value, CoherentLabel):
        return value
    if not isinstance(value, dict):
        raise InvalidConfig(f"Label must be a dictionary, not '{type(value).__name__}'")
    try:
        if 'gamma' in value:
            gamma = value['gamma']
            if isinstance(gamma, str):
                gamma = complex(float(gamma))
            elif isinstance(gamma, (list, tuple)):
                if len(gamma) != 2:
                    raise InvalidConfig(f"Complex label must be [re, im], got '{gamma}'")
                gamma = complex(float(gamma[0]), float(gamma[1]))
            return CoherentLabel.from_gamma(gamma)
        if 'theta_deg' in value:
            return CoherentLabel.from_degrees(float(value['theta_deg']),
                                              float(value.get('phi_deg', 0.0)))
    except (TypeError, ValueError) as error:
        if isinstance(error, InvalidConfig):
            raise
        raise InvalidConfig(f"Invalid label '{value}': {error}") from error
    raise InvalidConfig(f"Label '{value}' needs 'theta_deg' or 'gamma'")


def label_from_gamma(gamma: float) -> CoherentLabel:
    """Label of a real gamma (``math.inf`` selects the south pole)"""
    return CoherentLabel.from_gamma(gamma)


def _check_positive(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"'{name}' must be a number, not '{type(value).__name__}'")
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidConfig(f"'{name}' must be positive and finite, got '{value}'")
    return float(value)


def _check_count(name: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidConfig(f"'{name}' must be an integer, not '{type(value).__name__}'")
    if value < minimum:
        raise InvalidConfig(f"'{name}' must be at least {minimum}, got '{value}'")
    return int(value)


@dataclass
class RunConfig(Serializable):
    """
    Configuration of a single decoherence run.

    Examples
    --------
    .. code-block:: python

        config = RunConfig(twice_j=20, t_max=0.5, samples=51)
        config.set_state({'label1': {'gamma': 0.5}, 'label2': {'gamma': 2.0}})
        curve = decoherence_curve(config.make_engine(), config.spin, config.label1, config.label2,
                                  config.taus())

    Attributes
    ----------
    twice_j : int
        Twice the spin quantum number
    label1 : :py:class:`~QCatLab.spin.CoherentLabel`
        First cat component (north pole by default)
    label2 : :py:class:`~QCatLab.spin.CoherentLabel`
        Second cat component (south pole by default)
    t_max : float
        Last sample time
    samples : int
        Number of samples including tau = 0
    engine : str
        Name of the evolution engine
    tol : float
        Tolerance of the reference integrator
    output_path : str
        Output file (empty for standard output)
    short_time_form : str
        Exponent of the short time propagator ('printed' or 'matched')
    window_end : float or None
        Upper end of the rate fit window (None for the default window)
    workers : int
        Number of worker threads
    """

    twice_j: int = 20
    label1: CoherentLabel = field(default_factory=lambda: CoherentLabel(0.0))
    label2: CoherentLabel = field(default_factory=lambda: CoherentLabel(math.pi))
    t_max: float = 1.0
    samples: int = 11
    engine: str = 'exact'
    tol: float = 1e-12
    output_path: str = ''
    short_time_form: str = 'printed'
    window_end: Optional[float] = None
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check all fields.

        Raises
        ------
        InvalidConfig
            If a field is invalid
        """
        self.twice_j = _check_count('twice_j', self.twice_j, 1)
        self.samples = _check_count('samples', self.samples, 2)
        self.workers = _check_count('workers', self.workers, 1)
        self.t_max = _check_positive('t_max', self.t_max)
        self.tol = _check_positive('tol', self.tol)
        if self.window_end is not None:
            self.window_end = _check_positive('window_end', self.window_end)
        self.engine = normalize_engine_name(self.engine)
        if self.short_time_form not in SHORT_TIME_FORMS:
            raise InvalidConfig(f"Short time form must be one of {SHORT_TIME_FORMS}, "
                                f"got '{self.short_time_form}'")
        self.label1 = parse_label(self.label1)
        self.label2 = parse_label(self.label2)

    @property
    def spin(self) -> SpinQuantum:
        """Spin of the run"""
        return SpinQuantum(self.twice_j)

    def taus(self) -> np.ndarray:
        """Equally spaced sample times from 0 to :py:attr:`t_max`"""
        return np.linspace(0.0, self.t_max, self.samples)

    def make_engine(self, perturbation: float = 0.0) -> Engine:
        """
        Create the configured engine.

        Parameters
        ----------
        perturbation : float, default=0.0
            Fault injection factor of the exact engine

        Returns
        -------
        :py:class:`~QCatLab.engines.Engine`
            Engine instance
        """
        if self.engine == 'oracle':
            return get_engine('oracle', tol=self.tol)
        if self.engine == 'short-time':
            return get_engine('short-time', form=self.short_time_form)
        return get_engine(self.engine, perturbation=perturbation)

    def get_state(self) -> dict:
        return {
            'twice_j': self.twice_j,
            'label1': self.label1.get_state(),
            'label2': self.label2.get_state(),
            't_max': self.t_max,
            'samples': self.samples,
            'engine': self.engine,
            'tol': self.tol,
            'output_path': self.output_path,
            'short_time_form': self.short_time_form,
            'window_end': self.window_end,
            'workers': self.workers
        }

    def set_state(self, state: dict) -> bool:
        _apply_state(self, state)
        self.validate()
        return True


@dataclass
class ScanConfig(Serializable):
    """
    Configuration of a rate scan over spins and label pairs.

    Attributes
    ----------
    twice_js : list[int]
        Values of 2j
    pairs : list[tuple[float, float]]
        Real label pairs (gamma1, gamma2)
    window_jtau : float
        Fit window in units of j tau
    window_samples : int
        Number of nonzero samples in the window
    engine : str
        Name of the evolution engine
    tol : float
        Tolerance of the reference integrator (used by the oracle engine)
    output_path : str
        Output file (empty for standard output)
    workers : int
        Number of worker threads
    """

    twice_js: list[int] = field(default_factory=lambda: [60, 120])
    pairs: list[tuple[float, float]] = field(default_factory=lambda: [(0.3, 0.9), (0.5, 2.0)])
    window_jtau: float = 0.05
    window_samples: int = 9
    engine: str = 'exact'
    tol: float = 1e-12
    output_path: str = ''
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check all fields.

        Raises
        ------
        InvalidConfig
            If a field is invalid
        """
        if len(self.twice_js) == 0 or len(self.pairs) == 0:
            raise InvalidConfig('A scan needs at least one spin and one label pair')
        self.twice_js = [_check_count('twice_js', twice_j, 1) for twice_j in self.twice_js]
        pairs = []
        for pair in self.pairs:
            if len(pair) != 2:
                raise InvalidConfig(f"Label pair must have two entries, got '{pair}'")
            pairs.append((_check_non_negative('gamma', pair[0]),
                          _check_non_negative('gamma', pair[1])))
        self.pairs = pairs
        self.window_jtau = _check_positive('window_jtau', self.window_jtau)
        self.window_samples = _check_count('window_samples', self.window_samples, 5)
        self.tol = _check_positive('tol', self.tol)
        self.workers = _check_count('workers', self.workers, 1)
        self.engine = normalize_engine_name(self.engine)

    def points(self) -> list[tuple[int, float, float]]:
        """Scan points (2j, gamma1, gamma2) sorted by scan key"""
        return sorted((twice_j, gamma1, gamma2) for twice_j in self.twice_js
                      for gamma1, gamma2 in self.pairs)

    def make_engine(self) -> Engine:
        """Create the configured engine"""
        if self.engine == 'oracle':
            return get_engine('oracle', tol=self.tol)
        return get_engine(self.engine)

    def get_state(self) -> dict:
        return {
            'twice_js': list(self.twice_js),
            'pairs': [list(pair) for pair in self.pairs],
            'window_jtau': self.window_jtau,
            'window_samples': self.window_samples,
            'engine': self.engine,
            'tol': self.tol,
            'output_path': self.output_path,
            'workers': self.workers
        }

    def set_state(self, state: dict) -> bool:
        _apply_state(self, state)
        if 'pairs' in state:
            self.pairs = [tuple(pair) for pair in self.pairs]
        self.validate()
        return True


def _check_non_negative(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"'{name}' must be a number, not '{type(value).__name__}'")
    if math.isnan(value) or value < 0.0:
        raise InvalidConfig(f"'{name}' must be non-negative, got '{value}'")
    return float(value)


@dataclass
class LabUnits(Serializable):
    """
    Laboratory rates of the atoms-in-a-cavity setup.

    Attributes
    ----------
    g : float
        Atom-field coupling (1/s)
    kappa : float
        Cavity decay rate (1/s)
    delta : float
        Cavity detuning during the preparation (1/s)
    """

    g: float = 1e3
    kappa: float = 1e7
    delta: float = 1e9

    WEAK_COUPLING_LIMIT = 0.1
    """float: Largest g sqrt(N) / kappa reported as weak coupling"""

    DISPERSIVE_LIMIT = 10.0
    """float: Smallest delta / kappa reported as dispersive"""

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Check that all rates are positive.

        Raises
        ------
        InvalidConfig
            If a rate is not positive
        """
        self.g = _check_positive('g', self.g)
        self.kappa = _check_positive('kappa', self.kappa)
        self.delta = _check_positive('delta', self.delta)

    def coupling_ratio(self, spin: SpinQuantum) -> float:
        """g sqrt(N) / kappa for N = 2j atoms"""
        return self.g * math.sqrt(spin.twice_j) / self.kappa

    def is_weak_coupling(self, spin: SpinQuantum) -> bool:
        """Whether the master equation applies (g sqrt(N) / kappa below the limit)"""
        return self.coupling_ratio(spin) < self.WEAK_COUPLING_LIMIT

    def is_dispersive(self) -> bool:
        """Whether the detuned cavity switches the damping off (delta much larger than kappa)"""
        return self.delta / self.kappa > self.DISPERSIVE_LIMIT

    def twist_duration(self, chi: float) -> float:
        """
        Time (s) the detuned cavity needs to accumulate the twisting phase ``chi``.

        The twisting Hamiltonian is (g^2 / delta) J+J-.

        Parameters
        ----------
        chi : float
            Twisting phase

        Returns
        -------
        float
            Duration in seconds
        """
        if chi < 0.0:
            raise InvalidConfig(f"Twisting phase must be non-negative, got '{chi}'")
        return chi * self.delta / self.g ** 2

    def get_state(self) -> dict:
        return {'g': self.g, 'kappa': self.kappa, 'delta': self.delta}

    def set_state(self, state: dict) -> bool:
        _apply_state(self, state)
        self.validate()
        return True


def lab_time_to_tau(t_seconds: float, units: LabUnits, spin: SpinQuantum) -> float:
    """
    Convert a laboratory time to the dimensionless time tau = 2j g^2 t / kappa.

    Parameters
    ----------
    t_seconds : float
        Time in seconds (non-negative)
    units : :py:class:`LabUnits`
        Laboratory rates
    spin : :py:class:`~QCatLab.spin.SpinQuantum`
        Spin of the atoms

    Returns
    -------
    float
        Dimensionless time
    """
    if t_seconds < 0.0:
        raise InvalidConfig(f"Time must be non-negative, got '{t_seconds}'")
    if not units.is_weak_coupling(spin):
        logger.warning('Coupling ratio g sqrt(N)/kappa = %.3g for %s is not small',
                       units.coupling_ratio(spin), spin)
    return spin.twice_j * units.g ** 2 * t_seconds / units.kappa


def _apply_state(config: Serializable, state: dict) -> None:
    if not isinstance(state, dict):
        raise InvalidConfig(f"Config state must be a dictionary, not '{type(state).__name__}'")
    names = {item.name for item in fields(config)}
    for key, value in state.items():
        if key not in names:
            raise InvalidConfig(f"Unknown config key '{key}' for {type(config).__name__}")
        setattr(config, key, value)


def load_config_file(path: str) -> dict:
    """
    Read a JSON config file.

    The file holds one object whose keys are run config fields; the optional sections ``scan``,
    ``units`` and ``profile`` configure :py:class:`ScanConfig`, :py:class:`LabUnits` and the
    acceptance profile.

    Parameters
    ----------
    path : str
        Path to the file

    Returns
    -------
    dict
        Parsed config

    Raises
    ------
    InvalidConfig
        If the file is not valid JSON or does not hold an object
    """
    with open(path, 'r', encoding='utf-8') as file:
        try:
            state = json.load(file)
        except json.JSONDecodeError as error:
            raise InvalidConfig(f"Config file '{path}' is not valid JSON: {error}") from error
    if not isinstance(state, dict):
        raise InvalidConfig(f"Config file '{path}' must hold a JSON object")
    logger.debug('Read config file %s with keys %s', path, sorted(state))
    return state
