"""Exception hierarchy shared by the simulator and the CLI."""


class QlgaError(Exception):
    """Base class for all simulator errors."""


class ConfigError(QlgaError, ValueError):
    """Invalid parameters or run configuration."""


class CapacityError(QlgaError):
    """A basis or operator would exceed the configured size cap."""

    def __init__(self, required: int, cap: int, what: str = "sector basis"):
        self.required = required
        self.cap = cap
        super().__init__(f"{what} needs {required} entries, cap is {cap}")


class UnsupportedSectorError(QlgaError):
    """The model defines no dynamics for the requested particle sector."""


class UnitarityError(QlgaError):
    """An operator failed its unitarity certificate."""


class ConvergenceError(QlgaError):
    """An eigendecomposition did not meet its residual tolerance."""


class BranchError(QlgaError):
    """An eigenphase branch could not be identified unambiguously."""
