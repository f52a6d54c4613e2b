"""Exception hierarchy shared by every qifcheck module."""


class QifError(Exception):
    """Base class for all errors raised by qifcheck."""


class QifSyntaxError(QifError):
    """Malformed program, formula, distribution or DIMACS text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DeclarationError(QifError):
    """Undeclared, duplicated or conflicting variable declarations."""


class CapacityError(QifError):
    """An exhaustive enumeration would exceed the configured bit budget."""


class DomainMismatchError(QifError):
    """Two programs (or a program and a distribution) disagree on inputs."""


class DistributionError(QifError):
    """A probability table is not a valid distribution over its domain."""


class NoCounterexampleError(QifError):
    """A witness was requested for a pair that satisfies the relation."""
