"""Exception types raised by the censar package.

Everything derives from :class:`CensarError` so callers can catch the whole
family at once; individual classes mirror the contract of the operation that
raises them.
"""


class CensarError(ValueError):
    """Base class for all censar errors."""


class NonStationaryError(CensarError):
    """AR coefficient vector lies outside the stationarity region."""


class LengthMismatchError(CensarError):
    """Series / design dimensions are inconsistent."""


class NonPositiveVarianceError(CensarError):
    """An innovation variance that must be positive is not."""


class InvalidSpecError(CensarError):
    """A distribution specification violates its constraints."""


class NotPositiveDefiniteError(CensarError):
    """A covariance matrix is not symmetric positive definite."""


class SingularDesignError(CensarError):
    """The (transformed) design matrix has no invertible normal equations."""


class DegenerateResidualError(CensarError):
    """Residual sum of squares is zero; the variance draw is undefined."""


class IndexOutOfRangeError(CensarError):
    """Time index outside the range an operation supports."""


class ConfigInvalidError(CensarError):
    """MCMC or run configuration violates its invariants."""


class EmptyChainError(CensarError):
    """An operation needs retained draws but the chain has none (or too few)."""


class ChainTooShortError(CensarError):
    """Chain is too short for the requested diagnostic."""


class TrainingTooSmallError(CensarError):
    """LFO-CV training size does not satisfy p < n < T."""


class DegenerateVarianceError(CensarError):
    """Predictive variance too close to zero to standardize a residual."""


class NonStationaryMeanError(CensarError):
    """Posterior central value of rho cannot be projected into the stationarity region."""


class NumericalUnderflowError(CensarError):
    """Per-observation predictive densities underflowed to zero."""


class InvalidScenarioError(CensarError):
    """Simulation scenario violates the study design."""
