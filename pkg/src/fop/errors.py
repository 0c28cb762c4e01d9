"""Exception hierarchy, mapped to CLI exit codes in fop.cli."""


class FopError(Exception):
    """Base class for all workbench errors."""


class ParseError(FopError):
    """Syntax error in the operator expression language."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SchemaError(FopError):
    """Malformed JSON document; carries a JSON-pointer path."""

    def __init__(self, message, pointer=""):
        self.pointer = pointer
        super().__init__(f"{message} (at {pointer or '/'})")


class MathDomainError(FopError):
    """Input outside the mathematical domain of an operation."""


class IrregularSingularityError(MathDomainError):
    """Raised where only regular singular points are meaningful."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"indicial equation undefined at irregular singularity {point}")


class NumericError(FopError):
    """Numerical failure (no convergence, residual too large, ...)."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class VerificationError(FopError):
    """A recomputation disagreed with stored expectations."""
