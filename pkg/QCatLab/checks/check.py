"""
Acceptance check evaluated as part of a :py:class:`~.scene.CheckScene`.

A check measures a set of values, compares them against the thresholds of a
:py:class:`~QCatLab.profiles.Profile` and stores the outcome. Checks declare the names of the checks
they depend on; the scene evaluates them in dependency order and passes the results of the
dependencies in.
"""
import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Optional

from QCatLab.util import NoValue
if TYPE_CHECKING:
    from QCatLab.checks.scene import CheckScene
    from QCatLab.profiles import Profile


logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """
    Outcome of one acceptance check.

    Attributes
    ----------
    name : str
        Name of the check
    title : str
        Human-readable title
    passed : bool
        Whether all conditions held
    measured : dict
        Measured values (JSON-safe)
    message : str
        Summary of the outcome (or the error that stopped the check)
    elapsed : float
        Wall time in seconds
    """

    name: str
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    message: str = ''
    elapsed: float = 0.0

    def get_state(self) -> dict:
        """JSON-safe representation"""
        return {'name': self.name, 'title': self.title, 'passed': self.passed,
                'measured': self.measured, 'message': self.message}


class Check(ABC):
    """
    Acceptance check.

    This class is abstract and cannot be used by itself. To define a check, inherit from this
    class, set a unique :py:attr:`code` and :py:attr:`name`, and implement :py:meth:`evaluate`.
    :py:meth:`evaluate` records measurements with :py:meth:`measure` and conditions with
    :py:meth:`require`; the check passes if every condition held.

    Examples
    --------
    .. code-block:: python

        class NormCheck(Check):
            code = 20           # Unique to NormCheck
            name = 'norm'
            title = 'Coherent states are normalized'

            def evaluate(self, profile, inputs):
                norm = coherent_state(SpinQuantum(10), CoherentLabel(1.0)).norm()
                self.measure('norm', norm)
                self.require(abs(norm - 1.0) < 1e-12, f'norm {norm} differs from 1')

    Attributes
    ----------
    scene : :py:class:`~.scene.CheckScene` or None
        Scene the check belongs to
    """

    code: int
    """int: Unique code that only one derived Check class can use"""

    name: str
    """str: Unique name of the check"""

    title: str = 'Check'
    """str: Human-readable title"""

    depends: tuple[str, ...] = ()
    """tuple[str, ...]: Names of the checks that must be evaluated first"""

    def __init__(self):
        self.scene: Optional['CheckScene'] = None
        self._measured: dict[str, Any] = {}
        self._failures: list[str] = []
        self._result = NoValue

    @abstractmethod
    def evaluate(self, profile: 'Profile', inputs: dict[str, CheckResult]) -> None:
        """
        Run the check.

        Parameters
        ----------
        profile : :py:class:`~QCatLab.profiles.Profile`
            Grids and thresholds
        inputs : dict[str, :py:class:`CheckResult`]
            Results of the checks listed in :py:attr:`depends`
        """

    def measure(self, key: str, value: Any) -> None:
        """
        Record a measured value.

        Parameters
        ----------
        key : str
            Name of the value
        value : Any
            JSON-safe value (numpy scalars and arrays are converted on export)
        """
        self._measured[key] = value

    def require(self, condition: bool, message: str) -> bool:
        """
        Record a condition of the check.

        Parameters
        ----------
        condition : bool
            Whether the condition holds
        message : str
            Description of the failure

        Returns
        -------
        bool
            ``condition``
        """
        if not condition:
            self._failures.append(message)
            logger.debug('Check %s: %s', self.name, message)
        return bool(condition)

    @property
    def result(self) -> Optional[CheckResult]:
        """Result of the last evaluation (None if the check did not run yet)"""
        return None if self._result is NoValue else self._result

    def reset(self) -> None:
        """Clear the cached result"""
        self._measured, self._failures, self._result = {}, [], NoValue

    def run(self, profile: 'Profile', inputs: dict[str, CheckResult]) -> CheckResult:
        """
        Evaluate the check (or catch any exception that is thrown) and cache the result.

        Dependencies that failed fail this check without evaluating it.

        Parameters
        ----------
        profile : :py:class:`~QCatLab.profiles.Profile`
            Grids and thresholds
        inputs : dict[str, :py:class:`CheckResult`]
            Results of the dependencies

        Returns
        -------
        :py:class:`CheckResult`
            Outcome
        """
        if self._result is not NoValue:
            return self._result
        start = time.perf_counter()
        failed = sorted(name for name, result in inputs.items() if not result.passed)
        try:
            if failed:
                self._failures.append(f"Dependencies failed: {', '.join(failed)}")
            else:
                self.evaluate(profile, inputs)
        except Exception as error:  # pylint: disable = broad-except
            logger.exception('Check %s raised an error', self.name)
            self._failures.append(f'{type(error).__name__}: {error}')
        finally:
            elapsed = time.perf_counter() - start
            message = '; '.join(self._failures) if self._failures else 'ok'
            self._result = CheckResult(self.name, self.title, not self._failures,
                                       dict(self._measured), message, elapsed)
        return self._result

    def __str__(self) -> str:
        return f'<{type(self).__name__} {self.name!r} (code {self.code})>'
