"""Exception hierarchy.

Input problems (bad files, invalid rates) derive from :class:`InputError`;
numerical failures (singular systems, slow convergence) derive from
:class:`NumericalError`.  The CLI maps the two families to distinct exit codes.
"""


class InputError(ValueError):
    """Base class for rejected input."""


class ShapeError(InputError):
    """Matrix dimensions are incompatible with the requested operation."""


class ParseError(InputError):
    """A matrix file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class ValidationError(InputError):
    """Matrix is not a right intensity matrix."""


class InvalidRateError(ValidationError):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"negative off-diagonal rate b[{i},{j}] = {value!r}")


class InvalidRowSumError(ValidationError):
    def __init__(self, row, deviation):
        self.row, self.deviation = row, deviation
        super().__init__(f"row {row} sums to {deviation!r}, expected 0")


class NumericalError(ArithmeticError):
    """Base class for numerical failures."""


class SingularMatrixError(NumericalError):
    def __init__(self, name="matrix", rcond=0.0):
        self.name, self.rcond = name, rcond
        super().__init__(f"{name} is numerically singular (rcond ~ {rcond:.3g})")


class DegenerateNullSpaceError(NumericalError):
    """No normalized left null vector could be extracted."""


class NumericalDegeneracyError(NumericalError):
    """A result violates a property that holds in exact arithmetic."""


class ConvergenceError(NumericalError):
    """An iteration did not settle within its cap."""
