from typing import Any, Optional


class CubeComplexError(ValueError):
    """Base error of the package. ``witness`` holds the offending data."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class InvalidComplexError(CubeComplexError):
    """A cube-complex axiom or the CAT(0) criterion is violated."""


class DisconnectedComplexError(CubeComplexError):
    """Two vertices lie in different components of the 1-skeleton."""


class PathError(CubeComplexError):
    """An edge-path has a step which is not an edge."""


class PreconditionError(CubeComplexError):
    """An operation was called outside its precondition."""


class ConsistencyError(CubeComplexError):
    """A statement that must hold on every CAT(0) cube complex failed."""


class ConvergenceError(CubeComplexError):
    """Power iteration did not converge within the iteration cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(message, witness=residual)
        self.residual = residual


class FamilyError(CubeComplexError):
    """Unknown family string, unsupported family or exceeded budget."""


class ConfigError(CubeComplexError):
    """Invalid run configuration."""
