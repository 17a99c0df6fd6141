"""Exception hierarchy shared by every qslearn module."""


class QSLearnError(Exception):
    """Base class for all errors raised by qslearn."""


class DomainError(QSLearnError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(QSLearnError, ValueError):
    """Array dimensions or register sizes do not agree."""


class DegenerateInputError(QSLearnError, ValueError):
    """Input cannot be normalized (zero vector and the like)."""


class ValidationError(QSLearnError, ValueError):
    """A structural invariant (unitarity, hermiticity, config bounds) fails."""


class ResourceError(QSLearnError, MemoryError):
    """Requested register exceeds the dense-simulation cap."""


class SingularityError(QSLearnError, ArithmeticError):
    """Linear system is singular within pivot tolerance."""


class RankError(SingularityError):
    """Design matrix is rank deficient."""


class PostSelectionError(QSLearnError, RuntimeError):
    """Post-selected branch has negligible probability."""


class ExtrapolationError(DomainError):
    """Evaluation point lies outside the fitted knot range."""


class DivergenceError(QSLearnError, FloatingPointError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class DataError(QSLearnError, ValueError):
    """Malformed dataset file."""

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
