"""Exception types shared across the package."""


class MarlabError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(MarlabError):
    """Tensor or parameter dimensions do not line up."""


class NumericError(MarlabError):
    """A computation produced or received non-finite values."""


class GraphError(MarlabError):
    """A backward pass was requested on a value outside the recorded graph."""


class ContractError(MarlabError):
    """A documented precondition of an operation was violated."""


class EmptyStoreError(MarlabError):
    """A replay store was sampled before holding any trajectories.

    Callers treat this as a not-ready signal and skip the training step.
    """


class ConfigError(MarlabError):
    """A config file failed to parse or validate.

    Carries the offending line number when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
