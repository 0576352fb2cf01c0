import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from fitting.services.exceptions import DegenerateSensitivityError
from optics.services import DipCurve, PrismGeometry, exit_index_response, prism_face_transmission


logger = logging.getLogger(__name__)

MIN_SLOPE_PER_RIU = 5.0
INDEX_STEP = 1e-5


@dataclass(frozen=True)
class IndexResolution:
    delta_n_classical: float
    delta_n_quantum: float
    slope_per_riu: float
    squeezing_db: float

    def to_dict(self) -> Dict:
        return {
            "delta_n_classical": self.delta_n_classical,
            "delta_n_quantum": self.delta_n_quantum,
            "slope_per_riu": self.slope_per_riu,
            "squeezing_db": self.squeezing_db,
        }


def reflectivity_slope(dip: DipCurve, locked_angle: float, index_step: float = INDEX_STEP) -> float:
    """Central-difference dR/dn3 at the locked angle, through the same model as the dip."""
    n3 = float(np.real(dip.stack.exit_medium.index))
    values = exit_index_response(dip.stack, locked_angle, [n3 - index_step, n3 + index_step])
    if dip.prism_correction:
        geometry = PrismGeometry(prism_index=float(np.real(dip.stack.incidence_medium.index)))
        values = values * prism_face_transmission(locked_angle, geometry)
    return float((values[1] - values[0]) / (2.0 * index_step))


def index_resolution(
    dip: DipCurve,
    locked_angle: float,
    noise_sigma_reflectivity: float,
    squeezing_db: float,
    min_slope: float = MIN_SLOPE_PER_RIU,
) -> IndexResolution:
    """Smallest resolvable index change for a given reflectivity noise.

    delta_n = sigma_R / |dR/dn3|; squeezing scales the noise amplitude, and
    so the resolution, by 10^(-S/20).

    Raises:
        DegenerateSensitivityError: If |dR/dn3| < min_slope (locked at the dip bottom).
        ValueError: If the noise level is negative or min_slope is not positive.
    """
    if noise_sigma_reflectivity < 0:
        raise ValueError(f"noise_sigma_reflectivity must be >= 0 (got {noise_sigma_reflectivity})")
    if min_slope <= 0:
        raise ValueError(f"min_slope must be > 0 (got {min_slope})")

    slope = reflectivity_slope(dip, locked_angle)
    logger.debug(f"dR/dn3 = {slope:.3f} per RIU at {locked_angle:.3f} deg")
    if abs(slope) < min_slope:
        raise DegenerateSensitivityError(
            f"|dR/dn3| = {abs(slope):.3g} at {locked_angle:.3f} deg is below {min_slope}; "
            f"the lock sits at the dip bottom"
        )

    classical = noise_sigma_reflectivity / abs(slope)
    return IndexResolution(
        delta_n_classical=classical,
        delta_n_quantum=classical * 10.0 ** (-squeezing_db / 20.0),
        slope_per_riu=slope,
        squeezing_db=squeezing_db,
    )
