import numpy as np

from quantum.services.exceptions import SnrDomainError, UndefinedSqueezingError


def to_db(ratio: float) -> float:
    return float(10.0 * np.log10(ratio))


def from_db(value_db: float) -> float:
    return float(10.0 ** (value_db / 10.0))


def squeezing_db(variance_diff: float, snl: float) -> float:
    """Noise reduction below the shot-noise limit, -10 log10(Var / SNL).

    Positive values mean the difference noise sits below the coherent level.

    Raises:
        UndefinedSqueezingError: If snl is not positive.
    """
    if snl <= 0:
        raise UndefinedSqueezingError(f"Shot-noise limit must be > 0 (got {snl})")
    if variance_diff <= 0:
        raise UndefinedSqueezingError(f"Difference variance must be > 0 (got {variance_diff})")
    return -to_db(variance_diff / snl)


def lossless_squeezing_db(gain: float) -> float:
    """Intensity-difference squeezing at the amplifier output, 10 log10(2g - 1)."""
    return to_db(2.0 * gain - 1.0)


def symmetric_loss_squeezing_db(source_squeezing_db: float, transmission: float) -> float:
    """Squeezing left after equal loss on both beams."""
    return -to_db(transmission * from_db(-source_squeezing_db) + (1.0 - transmission))


def quantum_advantage_db(snr_tmbss: float, snr_coh: float) -> float:
    """10 log10 of the squeezed-light SNR over the coherent-light SNR (power ratios).

    Raises:
        SnrDomainError: If either SNR is not positive.
    """
    if snr_tmbss <= 0 or snr_coh <= 0:
        raise SnrDomainError(
            f"SNRs must be positive to form a quantum advantage (got {snr_tmbss}, {snr_coh})"
        )
    return to_db(snr_tmbss / snr_coh)
