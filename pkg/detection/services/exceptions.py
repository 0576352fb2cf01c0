class DetectionError(Exception):
    """Base exception for trace synthesis and spectral analysis."""


class BudgetInconsistencyError(DetectionError, ValueError):
    """A noise budget cannot be realized as a Gaussian pair at the requested levels."""


class SegmentLengthError(DetectionError, ValueError):
    """Trace length is not the configured power-of-two segment length."""


class AnalysisBandError(DetectionError, ValueError):
    """The tone or the sideband noise band falls outside the spectrum."""


class NoisePowerDomainError(DetectionError, ValueError):
    """Noise powers must be positive to compare in dB."""
