"""Exception types shared across the package."""


class SagnacsimError(Exception):
    """Base class for all package errors."""


class PhysicsError(SagnacsimError):
    """A value or state violates a physical invariant (exit code 2 at the CLI)."""


class ConfigError(SagnacsimError):
    """A config file is missing, malformed, or fails schema validation (exit code 1)."""


class NonIdentifiableError(PhysicsError):
    """The observation set cannot pin down the requested fit parameters."""
