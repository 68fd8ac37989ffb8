"""Exception types shared across the package."""


class UnsupportedReductionError(ValueError):
    """Raised when a cut-cost family has no clique-expansion equivalent."""


class DisconnectedGraphError(ValueError):
    """Raised when an operation requires a connected (hyper)graph."""


class SolverConvergenceError(RuntimeError):
    """Raised when an iterative solver fails to meet its residual contract."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataIngestError(RuntimeError):
    """Raised for missing, corrupt or malformed dataset inputs."""


class HypergraphFormatError(DataIngestError):
    """Raised when a hypergraph file cannot be parsed."""
