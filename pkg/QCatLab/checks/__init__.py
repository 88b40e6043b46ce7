"""
Module containing the acceptance suite.

The suite is a :py:class:`~.scene.CheckScene` holding one :py:class:`~.check.Check` per
acceptance criterion. Checks declare their dependencies by name; the scene evaluates them in
dependency order and rejects cyclic dependencies.
"""
from .check import Check, CheckResult
from .scene import CheckScene, CheckType
from .criteria import ALL_CHECKS


def default_scene(fault: float = 0.0) -> CheckScene:
    """
    Create a scene with every acceptance check.

    Parameters
    ----------
    fault : float, default=0.0
        Relative error injected into the exact propagator

    Returns
    -------
    :py:class:`~.scene.CheckScene`
        Scene with all checks
    """
    return CheckScene((check_class() for check_class in ALL_CHECKS), fault)
