"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or out-of-regime configuration; maps to CLI exit code 2."""


class CapacityError(RuntimeError):
    """Requested register count exceeds the dense-statevector capacity; CLI exit code 3."""


class IntegrityError(RuntimeError):
    """Numerical integrity violated (norm drift, negative probability mass)."""
