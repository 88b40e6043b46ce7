"""
Base class for acceptance profiles

New profiles can be created by deriving from this class and giving each attribute a value (see
:py:mod:`~QCatLab.profiles`).
"""
import math
from typing import Type

from QCatLab.errors import InvalidConfig
from QCatLab.serialise import Serializable


QUARTER_TURN = math.pi / 4.0
"""float: Angle pi/4 in radians"""


class Profile(Serializable):
    """
    Profile base class storing the grids and thresholds of the acceptance checks.

    Values are class attributes. An instance can override some of them through
    :py:meth:`set_state` (for example from the ``profile`` section of a config file) without
    touching the class.
    """

    name: str
    """str: Name used to select the profile on the command line"""

    # Polar cat decay
    polar_twice_js: tuple[int, ...]
    """tuple[int, ...]: Values of 2j for the polar cat law"""
    polar_t_max: float
    """float: Last sample time of the polar cat curves"""
    polar_samples: int
    """int: Number of samples of the polar cat curves"""
    polar_tolerance: float
    """float: Largest allowed |n(tau) - exp(-tau)|"""

    # Engine equivalence
    equivalence_max_twice_j: int
    """int: Largest 2j compared (all integer and half-integer spins up to it)"""
    equivalence_taus: tuple[float, ...]
    """tuple[float, ...]: Times at which exact and reference evolution are compared"""
    equivalence_tolerance: float
    """float: Largest allowed element difference"""

    # Fit of decay rates
    window_jtau: float
    """float: Fit window in units of j tau"""
    window_samples: int
    """int: Number of nonzero samples in the fit window"""

    # Accelerated decay
    fast_labels: tuple[float, float]
    """tuple[float, float]: Real labels (gamma1, gamma2) of the accelerated case"""
    fast_twice_js: tuple[int, int]
    """tuple[int, int]: Values of 2j compared (the second is twice the first)"""
    fast_rate_tolerance: float
    """float: Relative tolerance of the fitted rate against the closed form"""
    scaling_tolerance: float
    """float: Tolerance of the rate ratio 2 on doubling j"""

    # Slow decay
    slow_labels: tuple[float, float]
    """tuple[float, float]: Real labels (gamma1, gamma2) of the slow case"""
    slow_twice_js: tuple[int, int]
    """tuple[int, int]: Values of 2j compared"""
    slow_spread: float
    """float: Largest relative difference of the fitted rates"""
    slow_linear_rate: float
    """float: Expected linear rate of the slow case"""
    slow_linear_tolerance: float
    """float: Relative tolerance on the linear rate"""
    slow_compare_tau: float
    """float: Time at which the slow closed forms are compared"""

    # Initial rate
    oracle_pairs: int
    """int: Number of random label pairs checked against finite differences"""
    oracle_twice_j: int
    """int: Value of 2j of the random pairs"""
    oracle_seed: int
    """int: Seed of the random pairs"""
    oracle_rtol: float
    """float: Relative tolerance between oracle rate and finite difference"""
    polar_rate_tolerance: float
    """float: Absolute tolerance of the polar cat rate -2"""
    symmetric_twice_js: tuple[int, ...]
    """tuple[int, ...]: Values of 2j for the symmetric cat rate"""
    symmetric_factor: float
    """float: Largest ratio between symmetric cat rates"""

    # Laplace expansion
    laplace_labels: tuple[float, float]
    """tuple[float, float]: Real labels of the Laplace check"""
    laplace_js: tuple[float, ...]
    """tuple[float, ...]: Values of j compared with quadrature"""
    laplace_reference_j: float
    """float: Value of j at which the relative error must be below :py:attr:`laplace_rtol`"""
    laplace_rtol: float
    """float: Relative error of the two term expansion"""
    laplace_ratio_tolerance: float
    """float: Tolerance of the leading ratio I[a0]/I[1] against a0 at the saddle"""
    saddle_gammas: tuple[float, ...]
    """tuple[float, ...]: Grid of labels on which numeric and closed form saddles are compared"""
    saddle_tolerance: float
    """float: Tolerance of the saddle comparison"""

    # Semiclassical n(tau)
    semiclassical_twice_j: int
    """int: Value of 2j of the semiclassical check"""
    semiclassical_jtau: float
    """float: Largest j tau compared"""
    semiclassical_samples: int
    """int: Number of nonzero samples compared"""
    semiclassical_tolerance: float
    """float: Relative tolerance on ln n"""

    # Preparation
    preparation_twice_j: int
    """int: Value of 2j of the prepared cat"""
    preparation_theta_offset: float
    """float: Polar offset of the prepared components"""
    preparation_fidelity: float
    """float: Smallest fidelity with the ideal symmetric cat"""
    control_axis_offset: float
    """float: Axis offset of the negative control"""

    # Pointer states
    pointer_js: tuple[float, ...]
    """tuple[float, ...]: Values of j of the pointer deviation check"""
    pointer_tolerance: float
    """float: Tolerance of the pointer deviation"""

    # Suite
    runtime_budget: float
    """float: Wall time budget of the whole suite in seconds"""

    def get_state(self) -> dict:
        state = {}
        for attribute in _attributes(type(self)):
            value = getattr(self, attribute)
            state[attribute] = list(value) if isinstance(value, tuple) else value
        return state

    def set_state(self, state: dict) -> bool:
        known = _attributes(type(self))
        for key, value in state.items():
            if key not in known:
                raise InvalidConfig(f"Unknown profile attribute '{key}'")
            current = getattr(self, key)
            if isinstance(current, tuple):
                value = tuple(value)
            elif isinstance(current, float) and isinstance(value, (int, float)):
                value = float(value)
            elif not isinstance(value, type(current)):
                raise InvalidConfig(f"Profile attribute '{key}' must be of type "
                                    f"{type(current).__name__}, not '{type(value).__name__}'")
            setattr(self, key, value)
        return True


def _attributes(profile_class: type) -> list[str]:
    names = []
    for klass in reversed(profile_class.__mro__):
        for name in getattr(klass, '__annotations__', {}):
            if name not in names:
                names.append(name)
    return names


ProfileType = Type[Profile]

