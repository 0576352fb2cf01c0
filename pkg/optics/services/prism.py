from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from optics.services.media import BK7_INDEX


@dataclass(frozen=True)
class PrismGeometry:
    """Isosceles coupling prism: entrance and exit faces both tilted by face_angle_deg
    from the hypotenuse (45 degrees for a right-angle prism)."""
    face_angle_deg: float = 45.0
    prism_index: float = BK7_INDEX

    def __post_init__(self):
        if not 0 < self.face_angle_deg < 90:
            raise ValueError(f"Face angle must lie in (0, 90) degrees (got {self.face_angle_deg})")
        if self.prism_index <= 1:
            raise ValueError(f"Prism index must be > 1 (got {self.prism_index})")


def external_to_internal_angle(phi_external_deg: ArrayLike, geometry: PrismGeometry) -> np.ndarray:
    """Map the angle to the entrance-face normal onto the incidence angle at the hypotenuse.

    Raises:
        ValueError: If |phi| >= 90 degrees.
    """
    phi = np.asarray(phi_external_deg, dtype=float)
    if np.any(np.abs(phi) >= 90):
        raise ValueError("External angle must satisfy |phi| < 90 degrees")

    refracted = np.arcsin(np.sin(np.deg2rad(phi)) / geometry.prism_index)
    return geometry.face_angle_deg + np.rad2deg(refracted)


def internal_to_external_angle(theta_internal_deg: ArrayLike, geometry: PrismGeometry) -> np.ndarray:
    """Inverse of external_to_internal_angle.

    Raises:
        ValueError: If the internal ray cannot leave through the entrance face.
    """
    inside = np.deg2rad(np.asarray(theta_internal_deg, dtype=float) - geometry.face_angle_deg)
    argument = geometry.prism_index * np.sin(inside)
    if np.any(np.abs(argument) >= 1):
        raise ValueError("Internal angle is totally reflected at the entrance face")
    return np.rad2deg(np.arcsin(argument))


def prism_face_transmission(theta_internal_deg: ArrayLike, geometry: PrismGeometry) -> np.ndarray:
    """TM power transmission through the entrance and exit faces combined.

    The exit face sees the mirrored ray, and transmission is reciprocal, so the
    round trip factor is the single-face transmission squared. Internal angles
    that no external ray can reach through the entrance face transmit nothing.
    """
    inside = np.deg2rad(np.asarray(theta_internal_deg, dtype=float) - geometry.face_angle_deg)
    n = geometry.prism_index
    argument = n * np.sin(inside)
    reachable = np.abs(argument) < 1

    phi = np.arcsin(np.where(reachable, argument, 0.0))
    r_tm = (n * np.cos(phi) - np.cos(inside)) / (n * np.cos(phi) + np.cos(inside))
    single_face = 1.0 - r_tm ** 2
    transmission = np.where(reachable, single_face ** 2, 0.0)
    return transmission[()]
