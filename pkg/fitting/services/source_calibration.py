import logging

from fitting.services.exceptions import SqueezingDomainError
from quantum.services import from_db, to_db


logger = logging.getLogger(__name__)


def max_squeezing_db(upstream_transmission: float) -> float:
    """Upper bound on the squeezing that survives equal loss on both beams."""
    if upstream_transmission >= 1.0:
        return float("inf")
    return -to_db(1.0 - upstream_transmission)


def fit_gain(squeezing_db_at_source: float, upstream_transmission: float = 1.0) -> float:
    """Four-wave-mixing gain that produces the measured squeezing.

    Lossless: 2g - 1 = 10^(S/10). With a symmetric transmission eta between
    the amplifier and the measurement, Var/SNL = 1 - eta + eta / (2g - 1) is
    solved for g instead.

    Args:
        squeezing_db_at_source: Measured intensity-difference squeezing, dB.
        upstream_transmission: Symmetric transmission the squeezing was
            measured behind, in (0, 1].

    Returns:
        Gain g >= 1.

    Raises:
        SqueezingDomainError: If the squeezing is negative or unreachable
            at the given transmission.
        ValueError: If the transmission lies outside (0, 1].
    """
    if not 0.0 < upstream_transmission <= 1.0:
        raise ValueError(f"upstream_transmission must lie in (0, 1] (got {upstream_transmission})")
    if squeezing_db_at_source < 0:
        raise SqueezingDomainError(f"Squeezing must be >= 0 dB (got {squeezing_db_at_source})")

    if upstream_transmission == 1.0:
        return (from_db(squeezing_db_at_source) + 1.0) / 2.0

    ceiling = max_squeezing_db(upstream_transmission)
    if squeezing_db_at_source >= ceiling:
        raise SqueezingDomainError(
            f"{squeezing_db_at_source} dB cannot survive transmission {upstream_transmission}; "
            f"the limit is {ceiling:.3f} dB"
        )

    noise_ratio = from_db(-squeezing_db_at_source)
    source_ratio = upstream_transmission / (noise_ratio - 1.0 + upstream_transmission)
    gain = (source_ratio + 1.0) / 2.0
    logger.info(
        f"{squeezing_db_at_source} dB behind transmission {upstream_transmission} "
        f"needs gain {gain:.4f} ({to_db(source_ratio):.3f} dB at the amplifier)"
    )
    return gain
