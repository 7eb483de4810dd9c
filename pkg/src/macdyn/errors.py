"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Input violates a documented precondition (bad signature, bad tableau, ...)."""


class BlockedMove(InvalidInput):
    """Requested coordinate increment would break weak monotonicity."""


class Infeasible(ValueError):
    """Supplied parameters are inconsistent (constraint violated, weights do not sum to one)."""


class UnsupportedBasis(ValueError):
    """Decomposition basis not available for this slice (e.g. too few free indices)."""


class InvariantViolation(RuntimeError):
    """An internal invariant failed at runtime (negative rate in honest mode, broken interlacing)."""


class ResourceLimit(RuntimeError):
    """Computation refused because it exceeds a configured size limit."""
