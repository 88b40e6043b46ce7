"""
Evolution engines

An engine maps an initial :py:class:`~QCatLab.dissipator.BlockDensity` to its value at later
times. All engines share the :py:class:`Engine` interface so that curves, checks and the command
line can switch between the reference integrator, the exact propagator and the short time
approximation by name.
"""
import logging
from abc import ABC, abstractmethod
from typing import Sequence, Type

from QCatLab.dissipator import (BlockDensity, evolve_exact, evolve_oracle, evolve_oracle_series,
                                short_time_block_propagator, SHORT_TIME_FORMS)
from QCatLab.errors import InvalidConfig


logger = logging.getLogger(__name__)


class Engine(ABC):
    """
    Abstract evolution engine.

    To define an engine, inherit from this class, give it a unique :py:attr:`code` and
    :py:attr:`name`, and implement :py:meth:`evolve`. The default :py:meth:`evolve_series` calls
    :py:meth:`evolve` once per sample time.

    Examples
    --------
    .. code-block:: python

        class FrozenEngine(Engine):
            code = 10          # Unique to FrozenEngine
            name = 'frozen'    # Name used on the command line

            def evolve(self, rho0, tau):
                return rho0    # Nothing ever decays
    """

    code: int
    """int: Unique code that only one derived Engine class can use"""

    name: str
    """str: Unique name used to select the engine"""

    @abstractmethod
    def evolve(self, rho0: BlockDensity, tau: float) -> BlockDensity:
        """
        Evolve a block density to time ``tau``.

        Parameters
        ----------
        rho0 : :py:class:`~QCatLab.dissipator.BlockDensity`
            Initial density
        tau : float
            Dimensionless time

        Returns
        -------
        :py:class:`~QCatLab.dissipator.BlockDensity`
            Evolved density
        """

    def evolve_series(self, rho0: BlockDensity, taus: Sequence[float]) -> list[BlockDensity]:
        """
        Evolve a block density to several times.

        Parameters
        ----------
        rho0 : :py:class:`~QCatLab.dissipator.BlockDensity`
            Initial density
        taus : Sequence[float]
            Sample times

        Returns
        -------
        list[:py:class:`~QCatLab.dissipator.BlockDensity`]
            Density at each sample time
        """
        return [self.evolve(rho0, tau) for tau in taus]

    def tag(self) -> str:
        """Short description used in curve metadata"""
        return self.name

    def __str__(self) -> str:
        return f"<{self.__class__.__name__} '{self.tag()}'>"


class OracleEngine(Engine):
    """
    Reference engine integrating the master equation with adaptive eighth order Runge-Kutta steps.

    Attributes
    ----------
    tol : float
        Relative tolerance of the step control
    """

    code = 0
    name = 'oracle'

    def __init__(self, tol: float = 1e-12):
        if tol <= 0.0:
            raise InvalidConfig(f"Oracle tolerance must be positive, got '{tol}'")
        self.tol: float = tol

    def evolve(self, rho0: BlockDensity, tau: float) -> BlockDensity:
        return evolve_oracle(rho0, tau, self.tol)

    def evolve_series(self, rho0: BlockDensity, taus: Sequence[float]) -> list[BlockDensity]:
        # One integration per block, sampled at every requested time
        return evolve_oracle_series(rho0, taus, self.tol)

    def tag(self) -> str:
        return f'{self.name}(tol={self.tol:g})'


class ExactEngine(Engine):
    """
    Engine applying the exact dissipative propagator block by block.

    Attributes
    ----------
    method : str
        Propagator evaluation path (``'auto'``, ``'residues'`` or ``'cascade'``)
    perturbation : float
        Relative error injected into every evolved entry. Zero for normal use; the acceptance
        suite sets it to prove that its comparisons can fail.
    """

    code = 1
    name = 'exact'

    def __init__(self, method: str = 'auto', perturbation: float = 0.0):
        if method not in ('auto', 'residues', 'cascade'):
            raise InvalidConfig(f"Unknown propagator method '{method}'")
        self.method: str = method
        self.perturbation: float = perturbation

    def evolve(self, rho0: BlockDensity, tau: float) -> BlockDensity:
        result = evolve_exact(rho0, tau, self.method)
        if self.perturbation != 0.0 and tau > 0.0:
            scale = 1.0 + self.perturbation
            result = result.map_blocks(lambda _, block: block * scale)
        return result

    def tag(self) -> str:
        if self.perturbation:
            return f'{self.name}({self.method}, perturbation={self.perturbation:g})'
        return f'{self.name}({self.method})'


class ShortTimeEngine(Engine):
    """
    Engine applying the short time propagator to every block.

    A warning is logged whenever a block is propagated outside of the validity region of the
    approximation.

    Attributes
    ----------
    form : str
        Exponent variant (``'printed'`` or ``'matched'``)
    """

    code = 2
    name = 'short-time'

    def __init__(self, form: str = 'printed'):
        if form not in SHORT_TIME_FORMS:
            raise InvalidConfig(f"Unknown short time form '{form}'")
        self.form: str = form

    def evolve(self, rho0: BlockDensity, tau: float) -> BlockDensity:
        outside = []

        def _evolve(twice_k, block):
            if not block.any():
                return block
            propagator, valid = short_time_block_propagator(rho0.spin, twice_k, tau, self.form)
            if not valid:
                outside.append(twice_k)
            return propagator @ block
        result = rho0.map_blocks(_evolve)

        if outside:
            logger.warning('Short time propagator used outside its validity region at tau=%g '
                           'for %d block(s) of %s', tau, len(outside), rho0.spin)
        return result

    def tag(self) -> str:
        return f'{self.name}({self.form})'


_ENGINES: tuple[Type[Engine], ...] = (OracleEngine, ExactEngine, ShortTimeEngine)


def available_engines() -> dict[str, Type[Engine]]:
    """
    Get the engines that can be selected by name.

    Returns
    -------
    dict[str, Type[:py:class:`Engine`]]
        Engine classes keyed by :py:attr:`Engine.name`

    Raises
    ------
    ValueError
        If two engines share a name or code
    """
    engines, known_codes = {}, []
    for engine_class in _ENGINES:
        if engine_class.code in known_codes or engine_class.name in engines:
            raise ValueError(f"An engine with code {engine_class.code} or name "
                             f"'{engine_class.name}' already exists")
        known_codes.append(engine_class.code)
        engines[engine_class.name] = engine_class
    return engines


def get_engine(name: str, **kwargs) -> Engine:
    """
    Create an engine by name.

    Examples
    --------
    .. code-block:: python

        engine = get_engine('oracle', tol=1e-13)
        engine = get_engine('short-time', form='matched')

    Parameters
    ----------
    name : str
        Engine name (see :py:func:`available_engines`)
    **kwargs
        Arguments passed to the engine constructor

    Returns
    -------
    :py:class:`Engine`
        Engine instance

    Raises
    ------
    InvalidConfig
        If no engine with this name exists
    """
    engines = available_engines()
    if name not in engines:
        raise InvalidConfig(f"Unknown engine '{name}', choose from {sorted(engines)}")
    return engines[name](**kwargs)
