"""Exception types raised across the toolkit."""


class ParameterError(ValueError):
    """A numeric or configuration parameter is outside its allowed range."""


class ShapeError(ValueError):
    """Array arguments have inconsistent or unsupported dimensions."""


class InvalidInputError(ValueError):
    """Numeric input contains NaN or infinite entries."""


class DomainError(ValueError):
    """A physical quantity (angle, element index) lies outside its valid domain."""


class DivergenceError(RuntimeError):
    """The completion iteration produced a non-finite iterate."""

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(message or f"iteration diverged at step {iteration}")


class RankDeficiencyError(RuntimeError):
    """Fewer numerically nonzero eigenvalues than requested sources."""


class AmbiguityError(RuntimeError):
    """A pencil eigenvalue maps outside the arcsin inversion domain."""

    def __init__(self, pole: complex, message: str | None = None):
        self.pole = pole
        super().__init__(
            message or f"pole {pole!r} falls outside the invertible angle range"
        )


class PipelineError(RuntimeError):
    """Failure inside a named stage of the fault-tolerant pipeline."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"[{stage}] {cause}")
