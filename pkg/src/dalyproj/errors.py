"""Exception hierarchy shared across the package.

Everything domain-level derives from DalyProjError so callers (notably the
CLI) can separate validation failures from genuine I/O problems with a
single except clause.
"""


class DalyProjError(Exception):
    """Base class for all domain errors raised by this package."""


class PanelError(DalyProjError):
    """CSV ingestion or panel invariant violation.

    Messages name the offending physical row number or (area, indicator,
    year) key so the failure is actionable without re-reading the file.
    """


class FitError(DalyProjError):
    """Base class for regression failures."""


class DegenerateRegressorError(FitError):
    """All regressor values are identical; no slope is identifiable."""


class SingularSystemError(FitError):
    """The normal equations are rank deficient (e.g. duplicate x with a
    quadratic model). Always a poorly conditioned configuration."""

    poorly_conditioned = True


class DomainError(FitError):
    """Input outside a model's mathematical domain (nonpositive response
    for a log-space fit, zero denominator for a ratio, share outside (0,1))."""


class UndefinedVarianceError(FitError):
    """Response values are all equal, so R-squared is undefined (SStot = 0)."""


class IncompleteSeriesError(DalyProjError):
    """A required observation year is missing from a series or from the
    HDI chain feeding a DALY projection."""


class InsufficientSampleError(DalyProjError):
    """Fewer data points than the operation needs."""
