"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleRouteError(DomainError):
    """Route time does not admit the linehaul leg (Vl * T <= L)."""


class DegenerateModeError(DomainError):
    """A fleet mode is well-formed but degenerate, e.g. DT with zero drones."""


class UnsupportedModeError(DomainError):
    """The operation is not defined for the given fleet mode."""


class FunctionalFormError(ArithmeticError):
    """A cost function does not follow the alpha*Q + beta*sqrt(Q) form."""


class NoCrossoverError(DomainError):
    """Coefficients admit no positive break-even density."""


class DegenerateProcessError(DomainError):
    """The demand process has zero volatility where randomness is required."""


class DivergentIntegralError(DomainError):
    """Discount rate too low for the perpetual saving stream to converge."""


class NoThresholdError(DomainError):
    """No positive switching threshold exists for the given coefficients."""


class InfeasibleRegimeError(ArithmeticError):
    """Solved thresholds violate the required ordering; ``solution`` holds them."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class SolverFailure(ArithmeticError):
    """A nonlinear solve did not converge.

    Carries the best scaled residual reached and the corresponding iterate.
    """

    def __init__(self, message, best_residual=float("nan"), best_x=None):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual
        self.best_x = best_x


class CalibrationError(ArithmeticError):
    """Calibration could not meet its residual tolerance."""

    def __init__(self, message, best_params=None, best_objective=float("nan")):
        super().__init__(f"{message} (best objective {best_objective:.3e})")
        self.best_params = best_params
        self.best_objective = best_objective
