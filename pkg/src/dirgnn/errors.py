"""Exception types shared across the package."""


class DirgnnError(Exception):
    """Base class for errors raised by this package."""


class IngestionError(DirgnnError):
    """Raised when an edge list, label file, or feature file is malformed."""


class ShapeMismatchError(DirgnnError):
    """Raised when matrix or vector dimensions do not line up."""


class NoEdgesError(DirgnnError):
    """Raised when a quantity is undefined because the input has no edges."""


class NumericError(DirgnnError):
    """Raised when a computation produces NaN or Inf."""


class TrainingError(DirgnnError):
    """Raised when a training run aborts.

    Carries the last epoch that produced a finite, checkpointed state so a
    caller can report how far the run got.
    """

    def __init__(self, message: str, last_good_epoch: int = 0):
        super().__init__(message)
        self.last_good_epoch = last_good_epoch
