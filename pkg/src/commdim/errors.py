"""Exception hierarchy shared by all modules."""


class CommDimError(ValueError):
    """Base class for every error raised by commdim."""


class NegativeEntry(CommDimError):
    pass


class RowSumViolation(CommDimError):
    pass


class NotDeterministic(CommDimError):
    pass


class NotPermutation(CommDimError):
    pass


class InvalidSize(CommDimError):
    pass


class UnknownName(CommDimError):
    pass


class InvalidParams(CommDimError):
    pass


class InvalidRange(CommDimError):
    pass


class PreconditionFailed(CommDimError):
    """A bound was requested for a matrix outside its hypotheses.

    ``precondition`` names the failed hypothesis (``"square"``, ``"rank"``,
    ``"disjoint_sparsity"``).
    """

    def __init__(self, precondition: str, message: str):
        super().__init__(message)
        self.precondition = precondition


class ShapeMismatch(CommDimError):
    pass


class NotStochasticProduct(CommDimError):
    pass


class InvalidEnsemble(CommDimError):
    pass


class FormatError(CommDimError):
    """Malformed matrix, protocol or tolerance file."""
