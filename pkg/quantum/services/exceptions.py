class QuantumModelError(Exception):
    """Base exception for the twin-beam noise model."""


class GainDomainError(QuantumModelError, ValueError):
    """Amplifier gain below 1 has no two-mode squeezing parameter."""


class UndefinedSqueezingError(QuantumModelError):
    """No light reaches the detectors, so the shot-noise limit is zero."""


class SnrDomainError(QuantumModelError, ValueError):
    """Signal-to-noise ratios must be positive to compare in dB."""
