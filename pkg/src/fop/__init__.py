"""Workbench for Fuchsian differential operators.

Exact operator algebra in the logarithmic-derivative presentation,
local exponent analysis (Riemann symbols), Frobenius series, numerical
monodromy at arbitrary precision, monodromy-invariant alternating
forms, and the exponent-shift decision layer built on top of them.
"""

__version__ = "0.1.0"

from .errors import (
    FopError,
    ParseError,
    SchemaError,
    MathDomainError,
    IrregularSingularityError,
    NumericError,
    VerificationError,
)

__all__ = [
    "__version__",
    "FopError",
    "ParseError",
    "SchemaError",
    "MathDomainError",
    "IrregularSingularityError",
    "NumericError",
    "VerificationError",
]
