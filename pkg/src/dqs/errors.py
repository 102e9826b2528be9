"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid run or integrator configuration."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance."""


class HorizonTooShortError(ConvergenceError):
    """Correlation residual has not decayed by the end of the trace."""


class FitError(RuntimeError):
    """Lorentzian least-squares fit failed."""


class ExtractionError(ValueError):
    """No usable peaks to extract a quasienergy from."""
