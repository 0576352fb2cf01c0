class FittingError(Exception):
    """Base exception for parameter recovery."""


class DegenerateFitError(FittingError):
    """The Jacobian at the optimum is rank deficient, so the parameters are not identifiable."""


class DegenerateSensitivityError(FittingError, ValueError):
    """The locked angle sits at the dip bottom where dR/dn3 vanishes."""


class SqueezingDomainError(FittingError, ValueError):
    """The squeezing value cannot be produced by any gain at the given loss."""
