"""Exception hierarchy shared by every module of the package."""


class TimeChangeError(Exception):
    """Base class for all package errors."""


class QuadratureError(TimeChangeError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance within the subdivision budget."""

    def __init__(self, what, value, error, tolerance):
        self.value = value
        self.error = error
        self.tolerance = tolerance
        super().__init__(
            f"quadrature for {what} did not converge: value={value!r}, "
            f"estimated error={error:.3e} > tolerance={tolerance:.3e}"
        )


class DomainError(TimeChangeError, ValueError):
    """Argument outside the region where the requested quantity exists."""


class SingularOriginError(DomainError):
    """Time integral from the calendar origin requested for a clock that is singular there
    and carries no closed form covering ``[0, domain_start]``."""


class UnsupportedModelError(TimeChangeError, NotImplementedError):
    """The model lacks the structure (density, closed form, ...) the operation needs."""


class InadmissibleModelError(DomainError):
    """Risk-neutral pricing impossible: the required exponential moment does not exist."""


class ConfigError(TimeChangeError, ValueError):
    """Malformed or inconsistent run configuration."""


class ConvergenceError(TimeChangeError, ArithmeticError):
    """A series or refinement did not stabilise to the requested tolerance."""
