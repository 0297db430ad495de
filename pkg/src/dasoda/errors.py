"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DasodaError(Exception):
    """Base class for every error raised by this package."""


class InputError(DasodaError, ValueError):
    """Malformed or out-of-range input."""


class CapacityError(DasodaError):
    """An exact search was asked to handle an instance beyond its limits."""


class SolverEnvironmentError(DasodaError, RuntimeError):
    """An external solver is missing, crashed, or produced unreadable output."""


class LayoutError(InputError):
    """A SODA solution or solver model does not describe a valid double-array."""


class DecodeError(LayoutError):
    """A model violates the exactly-one base constraint."""


class StructuralError(InputError):
    """A superstring does not decompose the way the reduction requires."""
