"""Exception hierarchy shared across the library.

The scenario runner maps these onto process exit codes: config errors are 2,
precondition failures 3, and falsified invariants 4.
"""


class TorgapError(Exception):
    """Base class for all library errors."""


class ConfigError(TorgapError):
    """Malformed or inconsistent run configuration."""


class PreconditionError(TorgapError):
    """An operation was called outside its stated domain."""


class DimensionError(PreconditionError):
    """Shapes or ranks do not line up."""


class SurjectivityError(PreconditionError):
    """The assembled difference operator is not onto (positive b1 analog)."""

    def __init__(self, defect: int, message: str | None = None):
        self.defect = defect
        super().__init__(message or f"operator not surjective, defect dimension {defect}")


class InconsistentClassError(PreconditionError):
    """A class lies outside the range of the operator; carries the residual."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"class not in range, least-squares residual {residual:.3e}")


class DisconnectedGraphError(PreconditionError):
    """Spectral-gap quantities are only defined for connected graphs."""


class FalsifiedInvariantError(TorgapError):
    """A quantity the theory guarantees was measured to fail."""
