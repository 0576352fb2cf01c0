import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from optics.services.exceptions import NoResonanceError
from optics.services.media import LayerStack
from optics.services.prism import PrismGeometry, prism_face_transmission
from optics.services.transfer_matrix import reflectivity


logger = logging.getLogger(__name__)

DEFAULT_SWEEP_STEP_DEG = 0.01


@dataclass(frozen=True)
class DipCurve:
    """Reflectivity versus internal angle with the located resonance.

    dip_found is False when the lowest sample sits on a sweep endpoint; the
    resonance fields then report that endpoint.
    """
    angles: np.ndarray
    reflectivity: np.ndarray
    resonance_angle: float
    min_reflectivity: float
    dip_found: bool
    stack: LayerStack
    prism_correction: bool = False

    def to_rows(self) -> List[Tuple[float, float]]:
        return [(float(a), float(r)) for a, r in zip(self.angles, self.reflectivity)]

    def summary(self) -> Dict:
        return {
            "stack": self.stack.to_dict(),
            "resonance_angle_deg": self.resonance_angle,
            "min_reflectivity": self.min_reflectivity,
            "dip_found": self.dip_found,
            "prism_correction": self.prism_correction,
        }


def find_resonance(angles: np.ndarray, values: np.ndarray) -> Tuple[float, float, bool]:
    """Locate the minimum of a uniformly sampled curve.

    Takes the lowest sample and refines it with the parabola through it and
    its two neighbours.

    Returns:
        (angle, value, found); found is False when the lowest sample is an endpoint.
    """
    angles = np.asarray(angles, dtype=float)
    values = np.asarray(values, dtype=float)
    lowest = int(np.argmin(values))

    if lowest == 0 or lowest == len(values) - 1:
        return float(angles[lowest]), float(values[lowest]), False

    left, centre, right = values[lowest - 1], values[lowest], values[lowest + 1]
    curvature = left - 2.0 * centre + right
    if curvature <= 0:
        return float(angles[lowest]), float(centre), True

    step = angles[lowest + 1] - angles[lowest]
    offset = 0.5 * step * (left - right) / curvature
    vertex = centre - (left - right) ** 2 / (8.0 * curvature)
    return float(angles[lowest] + offset), float(vertex), True


def angle_grid(theta_min: float, theta_max: float, step: float) -> np.ndarray:
    if not theta_min < theta_max:
        raise ValueError(f"Sweep needs theta_min < theta_max (got {theta_min}, {theta_max})")
    if step <= 0:
        raise ValueError(f"Sweep step must be > 0 (got {step})")

    count = int(np.floor((theta_max - theta_min) / step + 1e-9)) + 1
    return theta_min + step * np.arange(count)


def reflectivity_sweep(
    stack: LayerStack,
    theta_min: float,
    theta_max: float,
    step: float = DEFAULT_SWEEP_STEP_DEG,
    prism_correction: bool = True,
    geometry: Optional[PrismGeometry] = None,
) -> DipCurve:
    """Sweep |r|^2 over internal angles and locate the absorption dip.

    Args:
        stack: Prism / film / analyte stack.
        theta_min: First internal angle, degrees.
        theta_max: Last internal angle, degrees.
        step: Grid spacing, degrees.
        prism_correction: Multiply by the TM transmissions of the prism faces.
            This limits the usable range: internal angles farther than the
            critical angle from the face angle (beyond about 45 +/- 41.5
            degrees for BK7) cannot be reached from outside the prism, so
            they read zero and are left out of the dip search.
        geometry: Prism geometry for the face correction. Defaults to a
            right-angle prism of the stack's incidence index.

    Returns:
        DipCurve with dip_found False when no interior minimum exists.
    """
    angles = angle_grid(theta_min, theta_max, step)
    values = reflectivity(stack, angles)
    reachable = np.ones(angles.shape, dtype=bool)

    if prism_correction:
        geometry = geometry or PrismGeometry(prism_index=float(np.real(stack.incidence_medium.index)))
        transmission = prism_face_transmission(angles, geometry)
        values = values * transmission
        reachable = transmission > 0
        if not reachable.all():
            logger.warning(
                f"{int((~reachable).sum())} sweep angle(s) cannot be reached through the prism face"
            )

    if reachable.any():
        resonance, minimum, found = find_resonance(angles[reachable], values[reachable])
    else:
        resonance, minimum, found = float(angles[0]), 0.0, False
    if not found:
        logger.warning(
            f"No interior reflectivity minimum between {theta_min} and {theta_max} deg; "
            f"lowest sample at {resonance:.3f} deg"
        )

    return DipCurve(
        angles=angles,
        reflectivity=values,
        resonance_angle=resonance,
        min_reflectivity=minimum,
        dip_found=found,
        stack=stack,
        prism_correction=prism_correction,
    )


def resonance_angle_closed_form(eps2: complex, eps3: complex, n1: float) -> float:
    """Lossless estimate n1 sin(theta_r) = sqrt(eps2 eps3 / (eps2 + eps3)).

    Only real parts of the permittivities enter.

    Raises:
        NoResonanceError: If no bound mode exists or the prism index is too low.
    """
    metal = complex(eps2).real
    dielectric = complex(eps3).real

    if metal >= 0 or abs(metal) <= dielectric:
        raise NoResonanceError(
            f"No bound surface plasmon for Re(eps2)={metal} and Re(eps3)={dielectric}"
        )

    argument = np.sqrt(metal * dielectric / (metal + dielectric)) / n1
    if argument > 1:
        raise NoResonanceError(
            f"Prism index {n1} too low to phase match the plasmon (sin(theta_r) = {argument:.4f})"
        )

    return float(np.rad2deg(np.arcsin(argument)))
