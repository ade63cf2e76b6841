"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or violated operation precondition."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge; carries the achieved tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class EscapedTrajectoryError(NumericalError):
    """A classical trajectory left the escape bound; carries the escape time."""

    def __init__(self, message, escape_time=None):
        super().__init__(message)
        self.escape_time = escape_time


class StageError(RuntimeError):
    """Pipeline failure wrapper naming the stage that failed."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
