"""
Exception types raised by the lab.

All domain errors derive from :py:class:`QCatLabError`, which is itself a ``ValueError``. Code that
already handles invalid arguments with ``except ValueError`` keeps working.
"""


class QCatLabError(ValueError):
    """Base class for all errors raised by the lab"""


class DegenerateCat(QCatLabError):
    """The two components of a cat state cancel each other"""


class StepUnderflow(QCatLabError):
    """The step control of the reference integrator stalled"""


class IndexOutOfRange(QCatLabError):
    """Propagator indices (m, n, k) do not describe a valid density matrix element"""


class DomainError(QCatLabError):
    """A point or parameter lies outside the domain where a formula is defined"""


class BoundarySaddle(QCatLabError):
    """The maximum of the action lies on (or too close to) the boundary w = 0"""


class DerivativeInstability(QCatLabError):
    """Finite difference estimates at two step sizes disagree"""


class QuadratureFailure(QCatLabError):
    """Adaptive quadrature did not reach the requested tolerance"""


class WrongRegime(QCatLabError):
    """A closed-form prediction was requested outside of its regime"""


class InsufficientSamples(QCatLabError):
    """Not enough (positive) samples in the fit window"""


class PipelineFidelityLow(QCatLabError):
    """The prepared state is not a two-component superposition of coherent states"""


class DimensionMismatch(QCatLabError):
    """Two states belong to different spins"""


class InvalidConfig(QCatLabError):
    """A configuration value is missing or invalid"""


class HalfIntegerSpin(InvalidConfig):
    """An operation that requires integer j received a half-integer spin"""


class CycleError(QCatLabError):
    """The check dependencies contain a cycle"""
