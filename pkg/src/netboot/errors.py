"""Exception types shared across the package."""


class NetbootError(Exception):
    """Base class for all netboot errors."""


class EdgeListParseError(NetbootError, ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DegenerateModelError(NetbootError, ValueError):
    """An estimator cannot produce a usable model (e.g. empty graph)."""


class EstimationError(NetbootError, ValueError):
    """Model estimation failed; message names the offending component."""


class EigenSolverError(NetbootError, RuntimeError):
    """Iterative eigensolver failed to converge; carries the residual norm."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class UndefinedStatisticError(NetbootError, ValueError):
    """The statistic is undefined on this graph (e.g. clustering at a degree-1 node)."""


class UnsupportedMotifError(NetbootError, ValueError):
    """The motif is too large for the requested exact computation."""


class InsufficientSamplesError(NetbootError, ValueError):
    """Too few bootstrap draws behind a requested quantile."""


class EmptyDistributionError(NetbootError, RuntimeError):
    """Every bootstrap replicate was dropped."""


class TooManyDropsError(NetbootError, RuntimeError):
    """More than half of the bootstrap replicates were dropped."""
