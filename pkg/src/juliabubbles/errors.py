"""Exception types shared across the package."""


class JuliaBubblesError(Exception):
    pass


class NoConvergenceError(JuliaBubblesError):
    """Root finder or Newton iteration failed to converge."""


class IndeterminateError(JuliaBubblesError):
    """Numerator and denominator vanish at the same point (invalid map)."""


class PeriodTooLargeError(JuliaBubblesError):
    """Requested period would exceed the root-finder degree cap."""


class ExcludedParameterError(JuliaBubblesError):
    """Family parameter hits an excluded value."""

    def __init__(self, family, key, value, constraint):
        self.family = family
        self.key = key
        self.value = value
        self.constraint = constraint
        super().__init__(f"{family}: parameter {key}={value} violates {constraint}")


class WrongPeriodError(JuliaBubblesError):
    """Solved cycle has exact period lower than requested."""

    def __init__(self, requested, actual, parameter):
        self.requested = requested
        self.actual = actual
        self.parameter = parameter
        super().__init__(
            f"cycle through marked point has exact period {actual}, wanted {requested}"
            f" (parameter {parameter})"
        )


class DegenerateSetError(JuliaBubblesError):
    """Point set has (numerically) zero diameter."""


class DegenerateComponentError(JuliaBubblesError):
    """Component too small for boundary extraction or turning estimates."""


class OutOfWindowError(JuliaBubblesError):
    """Query point falls outside the rendered window."""


class InsufficientScalesError(JuliaBubblesError):
    """Not enough usable dyadic scales for a box-counting fit."""
