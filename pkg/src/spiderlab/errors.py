"""Shared exception types."""


class SpiderError(Exception):
    pass


class UnsupportedN(SpiderError, ValueError):
    """Raised when a closed form is requested for a rib count we cannot serve."""


class DomainViolation(SpiderError, ValueError):
    """Evaluation point outside the state space (x > s_r, negative record, ...)."""


class DimensionMismatch(SpiderError, ValueError):
    """Record vector length does not match the rib count."""


class ExcessiveCensoring(SpiderError, RuntimeError):
    """Too many paths hit max_steps before the stopping rule fired."""


class NonConvergence(SpiderError, RuntimeError):
    """Grid solver failed to reach the requested residual."""
