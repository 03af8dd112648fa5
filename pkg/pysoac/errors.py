"""
Exception hierarchy for pysoac.
Library code raises these; only the command line turns them into exit codes.
"""

from typing import Optional


class PysoacError(Exception):
    """Base class for every error raised by pysoac"""


class ModelValidationError(PysoacError, ValueError):
    """An ILP model, constraint or configuration violates its invariants"""


class DimensionError(ModelValidationError):
    """A vector does not match the number of model variables"""


class _LineError(PysoacError):
    """Error tied to a line of an input text"""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.message = message
        self.line_no = line_no
        if line_no is None:
            super().__init__(message)
        else:
            super().__init__(f"line {line_no}: {message}")


class MpsParseError(_LineError):
    """Malformed or unsupported MPS input"""


class SolParseError(_LineError):
    """Malformed .sol input"""


class SoacError(PysoacError):
    """Invalid operation on a self-organizing algebraic circuit"""


class NonFiniteStateError(PysoacError):
    """The flow field produced NaN or infinite components"""


class UndefinedGapError(PysoacError, ZeroDivisionError):
    """The optimality gap is undefined for a zero best objective"""


class OracleLimitError(PysoacError):
    """Model too large for exhaustive enumeration"""


class UnknownVariableError(PysoacError, KeyError):
    """A solution refers to a variable the model does not declare"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown variable"
