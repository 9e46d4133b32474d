"""Exception hierarchy. Each class carries a short machine-readable ``error_class``."""


class InfolatError(Exception):
    error_class = "InfolatError"


class ValidationError(InfolatError, ValueError):
    error_class = "ValidationError"


class DomainError(InfolatError, ValueError):
    error_class = "DomainError"


class NonUniqueSteadyState(InfolatError):
    error_class = "NonUniqueSteadyState"


class PhysicalityError(InfolatError):
    """Correlation matrix left the physical set [0, 1] beyond tolerance."""

    error_class = "PhysicalityError"

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class NumericalError(InfolatError):
    error_class = "NumericalError"


class SingularLogarithm(NumericalError):
    error_class = "SingularLogarithm"


class ConfigError(InfolatError):
    error_class = "ConfigError"
