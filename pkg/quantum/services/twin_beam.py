import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

from quantum.services.exceptions import GainDomainError


logger = logging.getLogger(__name__)

# Seed flux per spontaneous photon below which the bright-seed forms are flagged.
BRIGHT_SEED_RATIO = 100.0


def gain_to_squeeze_param(gain: float) -> float:
    """Invert g = cosh^2(r).

    Raises:
        GainDomainError: If gain < 1.
    """
    if gain < 1:
        raise GainDomainError(f"Amplifier gain must be >= 1 (got {gain})")
    return math.acosh(math.sqrt(gain))


@dataclass(frozen=True)
class TwinBeamSource:
    """Seeded two-mode squeezer reduced to its effective gain.

    seed_flux is the coherent seed photon number per analysis interval.
    """
    gain: float
    seed_flux: float

    def __post_init__(self):
        gain_to_squeeze_param(self.gain)
        if self.seed_flux <= 0:
            raise ValueError(f"Seed flux must be > 0 photons (got {self.seed_flux})")

    @property
    def squeeze_param(self) -> float:
        return gain_to_squeeze_param(self.gain)

    def to_dict(self) -> Dict:
        return {
            "gain": self.gain,
            "seed_flux": self.seed_flux,
            "squeeze_param": self.squeeze_param,
        }


@dataclass(frozen=True)
class BeamMoments:
    """Photon-number means, variances and probe/conjugate covariance."""
    mean_probe: float
    mean_conjugate: float
    var_probe: float
    var_conjugate: float
    covariance: float

    @property
    def means(self) -> Tuple[float, float]:
        return self.mean_probe, self.mean_conjugate

    @property
    def variances(self) -> Tuple[float, float]:
        return self.var_probe, self.var_conjugate

    @property
    def variance_difference(self) -> float:
        return self.var_probe + self.var_conjugate - 2.0 * self.covariance


def twin_beam_moments(source: TwinBeamSource, bright_seed: bool = True) -> BeamMoments:
    """Photon-number moments of the probe and conjugate at the amplifier output.

    Args:
        source: Gain and seed flux.
        bright_seed: Keep only the terms linear in the seed flux. With False the
            spontaneous-emission terms are added and the moments are exact.

    Returns:
        BeamMoments whose difference variance equals the seed flux either way.
    """
    g = source.gain
    n0 = source.seed_flux
    spontaneous = g - 1.0

    if bright_seed and n0 < BRIGHT_SEED_RATIO * spontaneous:
        logger.warning(
            f"Seed flux {n0:g} is below {BRIGHT_SEED_RATIO:g} x sinh^2(r) = "
            f"{BRIGHT_SEED_RATIO * spontaneous:g}; bright-seed moments are inaccurate"
        )

    moments = BeamMoments(
        mean_probe=g * n0,
        mean_conjugate=spontaneous * n0,
        var_probe=g * (2.0 * g - 1.0) * n0,
        var_conjugate=spontaneous * (2.0 * g - 1.0) * n0,
        covariance=2.0 * g * spontaneous * n0,
    )
    if bright_seed:
        return moments

    vacuum_pairs = g * spontaneous
    return BeamMoments(
        mean_probe=moments.mean_probe + spontaneous,
        mean_conjugate=moments.mean_conjugate + spontaneous,
        var_probe=moments.var_probe + vacuum_pairs,
        var_conjugate=moments.var_conjugate + vacuum_pairs,
        covariance=moments.covariance + vacuum_pairs,
    )
