"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PermclassError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCircuit(PermclassError, ValueError):
    pass


class ContainsReset(PermclassError):
    pass


class TooManyQubits(PermclassError):
    pass


class BadDimension(PermclassError, ValueError):
    pass


class DimensionMismatch(BadDimension):
    pass


class NotUnitary(PermclassError, ValueError):
    pass


class NotSeparable(PermclassError):
    """Raised when a matrix has no Kronecker factorization for the requested split.

    ``ratio`` carries the observed sigma_2 / sigma_1 of the rearranged matrix.
    """

    def __init__(self, ratio: float, message: str | None = None):
        self.ratio = float(ratio)
        super().__init__(message or f"not separable (sigma2/sigma1 = {self.ratio:.3e})")


class TooFewControls(PermclassError, ValueError):
    pass


class ParseError(PermclassError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class PreconditionError(PermclassError):
    """A transformation was asked to act outside the class it is defined for."""


class PipelineError(PermclassError):
    def __init__(self, stage: int, pass_id: str, reason: str):
        self.stage = stage
        self.pass_id = pass_id
        self.reason = reason
        super().__init__(f"stage {stage} ({pass_id}): {reason}")
