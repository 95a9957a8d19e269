"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` so the command line front end can map
library failures onto distinct process exit statuses.
"""


class ValdiffError(Exception):
    exit_code = 1

    def to_json(self):
        return {"error": type(self).__name__, "message": str(self)}


class UsageError(ValdiffError):
    exit_code = 64


class NonPrimeModulus(ValdiffError):
    exit_code = 10


class BadCoordinateLength(ValdiffError):
    exit_code = 11


class NoSolutionWithinBound(ValdiffError):
    exit_code = 12


class NoWitnessFound(ValdiffError):
    exit_code = 13


class MixedContext(ValdiffError):
    exit_code = 14


class InexactDivision(ValdiffError):
    exit_code = 15


class NotDivisible(ValdiffError):
    exit_code = 16


class ZeroArgument(ValdiffError):
    exit_code = 17


class PrecisionExhausted(ValdiffError):
    exit_code = 18


class NotHomogeneous(ValdiffError):
    exit_code = 19


class DivisionByZeroAtPrecision(ValdiffError):
    exit_code = 20


class NotInValuationRing(ValdiffError):
    exit_code = 21


class AllCoefficientsZero(ValdiffError):
    exit_code = 22


class CoefficientNotIntegral(ValdiffError):
    exit_code = 23


class ExactRootAlready(ValdiffError):
    exit_code = 24


class ResidueEquationUnsolvable(ValdiffError):
    exit_code = 2

    def __init__(self, message, equation=None, trace=None):
        super().__init__(message)
        self.equation = equation
        self.trace = trace


class NotApplicable(ValdiffError):
    exit_code = 3

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InconclusiveTail(ValdiffError):
    exit_code = 4


class MaxStepsExceeded(ValdiffError):
    exit_code = 25


class CandidateExhausted(ValdiffError):
    exit_code = 26


class AxiomThreeFailure(ValdiffError):
    exit_code = 27


class NotWittBackend(ValdiffError):
    exit_code = 28


class ExpressionSyntaxError(ValdiffError):
    exit_code = 65

    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column

    def to_json(self):
        out = super().to_json()
        out.update(line=self.line, column=self.column)
        return out


class PostconditionViolation(ValdiffError):
    """A guaranteed identity failed to hold; indicates a defect, not bad input."""

    exit_code = 29
