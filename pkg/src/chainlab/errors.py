"""Exception hierarchy for chain validation and analysis.

Validation errors carry an optional ``path`` attribute; the file-loading
layer fills it with the offending document field (``transitions[2]``,
``weights``, ...) so CLI diagnostics can point at the input.
"""


class ChainlabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ChainlabError):
    """A chain description violates a model invariant."""

    def __init__(self, message, *, path=None):
        super().__init__(message)
        self.path = path

    def __str__(self):
        message = super().__str__()
        if self.path:
            return f"{self.path}: {message}"
        return message


class NonSquareMatrix(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class RowSumViolation(ValidationError):
    def __init__(self, message, *, row=None, actual=None, path=None):
        super().__init__(message, path=path)
        self.row = row
        self.actual = actual


class DuplicateStateLabel(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class UnknownStateReference(ValidationError):
    pass


class MissingInitialVector(ValidationError):
    pass


class ParseError(ValidationError):
    """Input document is not a well-formed chain model file."""

    def __init__(self, message, *, location=None):
        super().__init__(message, path=location)
        self.location = location


class AnalysisError(ChainlabError):
    """An analysis was requested on a chain it does not apply to."""


class NotErgodic(AnalysisError):
    pass


class NotRegular(AnalysisError):
    pass


class NotAbsorbing(AnalysisError):
    pass


class StartNotTransient(AnalysisError):
    pass


class SingularMatrix(AnalysisError):
    """Pivot or determinant magnitude fell below the breakdown threshold."""


class SingularSystem(SingularMatrix):
    """Stationary solve broke down; should not happen for irreducible chains."""


class NoConvergence(AnalysisError):
    def __init__(self, message, *, max_iters=None, residual=None):
        super().__init__(message)
        self.max_iters = max_iters
        self.residual = residual


class DimensionTooLarge(AnalysisError):
    pass


class MissingWeight(AnalysisError):
    def __init__(self, message, *, state=None):
        super().__init__(message)
        self.state = state
