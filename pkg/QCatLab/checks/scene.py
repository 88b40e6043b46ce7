"""
Scene holding acceptance checks and their dependencies.

The scene builds a directed graph with an edge from every dependency to the check that needs it,
rejects cycles and evaluates the checks in topological order.
"""
import logging
import time
from typing import Iterable, Optional, Type

from networkx import (DiGraph, NetworkXNoCycle, NetworkXUnfeasible, find_cycle,
                      lexicographical_topological_sort)

from QCatLab.checks.check import Check, CheckResult
from QCatLab.engines import Engine, ExactEngine
from QCatLab.errors import CycleError
from QCatLab.profiles import FullProfile, Profile


logger = logging.getLogger(__name__)


class CheckScene:
    """
    Scene containing acceptance checks.

    Examples
    --------
    .. code-block:: python

        scene = CheckScene()
        scene.add_checks(check_class() for check_class in ALL_CHECKS)
        results = scene.evaluate(QuickProfile())
        print(all(result.passed for result in results.values()))

    Attributes
    ----------
    checks : list[:py:class:`~.check.Check`]
        Checks in the scene
    fault : float
        Relative error injected into the exact propagator (0 for a clean run)
    """

    def __init__(self, checks: Iterable[Check] = (), fault: float = 0.0):
        self.checks: list[Check] = []
        self.fault: float = float(fault)
        self._started: Optional[float] = None
        self._n_evaluated: int = 0
        self.add_checks(checks)

    def add_check(self, check: Check) -> None:
        """
        Add a check to the scene.

        Parameters
        ----------
        check : :py:class:`~.check.Check`
            Check to add

        Raises
        ------
        ValueError
            If a check with the same code or name is already in the scene
        """
        for other in self.checks:
            if other.code == check.code or other.name == check.name:
                raise ValueError(f"A check with code {check.code} or name '{check.name}' "
                                 f"already exists")
        check.scene = self
        self.checks.append(check)

    def add_checks(self, checks: Iterable[Check]) -> None:
        """
        Add multiple checks to the scene.

        Parameters
        ----------
        checks : Iterable[:py:class:`~.check.Check`]
            Checks to add
        """
        for check in checks:
            self.add_check(check)

    def get_check(self, name: str) -> Check:
        """
        Get a check by its name.

        Parameters
        ----------
        name : str
            Name of the check

        Returns
        -------
        :py:class:`~.check.Check`
            Check with this name

        Raises
        ------
        ValueError
            If no check has this name
        """
        for check in self.checks:
            if check.name == name:
                return check
        raise ValueError(f"Could not find check with name '{name}'")

    def exact_engine(self) -> Engine:
        """Exact propagator engine (perturbed when a fault is injected)"""
        return ExactEngine(perturbation=self.fault)

    def elapsed(self) -> float:
        """Seconds since the evaluation started (0 before it started)"""
        return 0.0 if self._started is None else time.perf_counter() - self._started

    def digraph(self) -> DiGraph:
        """
        Create a directed graph of the check dependencies.

        Returns
        -------
        DiGraph
            Graph with one node per check name and an edge from every dependency to its dependent

        Raises
        ------
        ValueError
            If a check depends on a check that is not in the scene
        """
        graph = DiGraph()
        names = [check.name for check in self.checks]
        for check in self.checks:
            graph.add_node(check.name)
        for check in self.checks:
            for dependency in check.depends:
                if dependency not in names:
                    raise ValueError(f"Check '{check.name}' depends on unknown check "
                                     f"'{dependency}'")
                graph.add_edge(dependency, check.name)
        return graph

    def has_cycles(self) -> bool:
        """
        Check if the dependencies form a cycle.

        Returns
        -------
        bool
            Whether a cycle is present
        """
        try:
            find_cycle(self.digraph())
            return True
        except NetworkXNoCycle:
            return False

    def order(self) -> list[Check]:
        """
        Checks in evaluation order (dependencies first, ties broken by code).

        Returns
        -------
        list[:py:class:`~.check.Check`]
            Ordered checks

        Raises
        ------
        CycleError
            If the dependencies contain a cycle
        """
        if self.has_cycles():
            raise CycleError('Cannot evaluate checks since there are cycles in the dependencies')
        codes = {check.name: check.code for check in self.checks}
        try:
            ordered = list(lexicographical_topological_sort(self.digraph(), key=codes.get))
        except NetworkXUnfeasible as error:
            raise CycleError(str(error)) from error
        return [self.get_check(name) for name in ordered]

    def evaluate(self, profile: Profile = None) -> dict[str, CheckResult]:
        """
        Evaluate all checks in dependency order.

        A check that raises is recorded as failed with the exception text and the evaluation
        continues with the next check.

        Parameters
        ----------
        profile : :py:class:`~QCatLab.profiles.Profile`, optional
            Grids and thresholds (defaults to :py:class:`~QCatLab.profiles.FullProfile`)

        Returns
        -------
        dict[str, :py:class:`~.check.CheckResult`]
            Results keyed by check name, in evaluation order
        """
        if profile is None:
            profile = FullProfile()
        ordered = self.order()
        for check in self.checks:
            check.reset()

        self._started = time.perf_counter()
        self._n_evaluated = 0
        results: dict[str, CheckResult] = {}
        for check in ordered:
            logger.info('Running check %s: %s', check.name, check.title)
            inputs = {name: results[name] for name in check.depends}
            results[check.name] = check.run(profile, inputs)
            self._log_progress(results[check.name], len(ordered))
        return results

    def _log_progress(self, result: CheckResult, total: int) -> None:
        self._n_evaluated += 1
        logger.info('[%d/%d] %s %s in %.2f s (%s)', self._n_evaluated, total, result.name,
                    'passed' if result.passed else 'FAILED', result.elapsed, result.message)

    def __str__(self) -> str:
        return f'<CheckScene with {len(self.checks)} checks>'


CheckType = Type[Check]
