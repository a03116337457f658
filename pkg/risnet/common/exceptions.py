"""Defines a list of exceptions."""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations

# Internal Imports
# Import only with "from x import y", to simplify the code.
from .debug import debug_point


class Error(Exception):
    """Base class for all simulator exceptions."""
    pass


class InvalidOptionError(Error):
    """
    Exception raised for invalid options passed.

    Arguments:
        message: Message that will be printed with the exception.
    """
    def __init__(self, message: str) -> InvalidOptionError:
        super().__init__(message)


class UnsupportedProtocolError(InvalidOptionError):
    """
    Exception raised when a channel estimation protocol is unknown,
    or cannot be used by the requested operation.

    Arguments:
        protocol: Name of the protocol.
        operation: Name of the operation that refused it.
    """
    def __init__(self, protocol: str,
                 operation: str = None) -> UnsupportedProtocolError:
        self.protocol = protocol
        if operation is None:
            message = f"Unknown protocol {protocol!r}."
        else:
            message = f"Protocol {protocol!r} is not supported by {operation}."
        super().__init__(message)


class InvalidConfigError(Error):
    """
    Exception raised for invalid system parameters.

    Arguments:
        message: Message that will be printed with the exception.
    """
    def __init__(self, message: str) -> InvalidConfigError:
        super().__init__(message)


class InvalidGeometryError(Error):
    """
    Exception raised when positions produce zero or negative distances,
    or have the wrong shape.

    Arguments:
        message: Message that will be printed with the exception.
    """
    def __init__(self, message: str) -> InvalidGeometryError:
        super().__init__(message)


class ConstraintViolationError(Error):
    """
    Exception raised when a phase vector is not unit modulus.

    Arguments:
        deviation: Largest observed | |phi| - 1 |.
    """
    def __init__(self, deviation: float) -> ConstraintViolationError:
        self.deviation = deviation
        super().__init__(
            f"Phase vector violates |phi| = 1 (max deviation {deviation:.3e}).")


class TrainingExceedsCoherenceError(Error):
    """
    Exception raised when the training overhead is larger than the
    coherence block, which would make the net rate negative.

    Arguments:
        overhead: Training symbols S * tau_S.
        tau_C: Coherence block length in symbols.
    """
    def __init__(self, overhead: float,
                 tau_C: float) -> TrainingExceedsCoherenceError:
        self.overhead = overhead
        self.tau_C = tau_C
        super().__init__(
            f"Training overhead of {overhead:g} symbols exceeds the "
            f"coherence block of {tau_C:g} symbols.")


class SimulationPointError(Error):
    """
    Exception for a sweep point that could not be evaluated.

    Arguments:
        context: Description of the sweep point (axis, value, protocol...).
        cause: Exception raised while evaluating the point.
        debug: If set, indicates the file to save the debug output created.
    """

    def __init__(self, context: dict, cause: Exception,
                 debug: str = None) -> SimulationPointError:
        self.context = context
        self.cause = cause
        if debug is not None:
            with open(debug, "a") as file_:
                file_.write(debug_point(context, cause))
            super().__init__(f"Debug information saved in file {debug}.")
        else:
            super().__init__(f"\n{debug_point(context, cause)}")
