"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Inadmissible shape parameters (dimension range, eps window, cap overrun)."""


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


class SolverError(RuntimeError):
    """Numerical solve left its guaranteed regime (positivity, truncation guard)."""


class AuditError(RuntimeError):
    """An audit could not be evaluated on the given scenario."""
