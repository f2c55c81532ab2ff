"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: InputError -> 1, PreconditionError -> 2,
InvariantBreach -> 3.  InvariantBreach signals a theorem-level contradiction
and is always a bug, never a user error.
"""


class ToricError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ToricError):
    """Malformed input data (bad file, zero vector, inconsistent shape)."""


class PreconditionError(ToricError):
    """A documented precondition of an operation is violated."""


class InvariantBreach(ToricError):
    """An internal invariant guaranteed by theory failed to hold."""
