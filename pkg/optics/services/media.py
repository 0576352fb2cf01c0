from dataclasses import dataclass, field, replace
from typing import Dict, List, Tuple

import numpy as np


LASER_WAVELENGTH_NM = 795.0
BK7_INDEX = 1.51
WATER_INDEX = 1.33
GOLD_THICKNESS_NM = 50.0

# Gold at 795 nm, interpolated from tabulated optical constants
# (n ~ 0.155, k ~ 4.86). Reproduces the water dip near 66 degrees on BK7.
GOLD_PERMITTIVITY_795NM = complex(-23.6, 1.5)

# Free-electron parameters for gold in eV; eps(795 nm) ~ -23.6 + 1.4i.
GOLD_DRUDE_EPS_INF = 9.84
GOLD_DRUDE_PLASMA_EV = 9.03
GOLD_DRUDE_DAMPING_EV = 0.067

HC_EV_NM = 1239.841984


@dataclass(frozen=True)
class Medium:
    """A homogeneous, non-magnetic layer material."""
    label: str
    permittivity: complex
    magnetic_permeability: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "permittivity", complex(self.permittivity))
        if self.magnetic_permeability != 1.0:
            raise ValueError(
                f"Medium '{self.label}' must be non-magnetic (got mu={self.magnetic_permeability})"
            )

    @classmethod
    def from_index(cls, label: str, index: float) -> "Medium":
        """Create a transparent medium from its refractive index (eps = n^2)."""
        return cls(label=label, permittivity=complex(index ** 2, 0.0))

    @property
    def index(self) -> complex:
        return np.sqrt(self.permittivity)

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "permittivity": {"real": self.permittivity.real, "imag": self.permittivity.imag},
        }


@dataclass(frozen=True)
class Film:
    medium: Medium
    thickness_nm: float

    def __post_init__(self):
        if self.thickness_nm < 0:
            raise ValueError(
                f"Film '{self.medium.label}' thickness must be >= 0 (got {self.thickness_nm} nm)"
            )


@dataclass(frozen=True)
class LayerStack:
    """Prism / film(s) / analyte stratified medium probed at one vacuum wavelength.

    Layers are indexed from the incidence side: 0 is the prism, 1..len(films)
    are the films in order, and len(films) + 1 is the exit medium.
    """
    incidence_medium: Medium
    exit_medium: Medium
    films: Tuple[Film, ...] = field(default_factory=tuple)
    vacuum_wavelength_nm: float = LASER_WAVELENGTH_NM

    def __post_init__(self):
        object.__setattr__(self, "films", tuple(self.films))
        if self.vacuum_wavelength_nm <= 0:
            raise ValueError(
                f"Vacuum wavelength must be > 0 (got {self.vacuum_wavelength_nm} nm)"
            )

    @property
    def wavenumber(self) -> float:
        """Vacuum wavenumber omega/c in nm^-1."""
        return 2.0 * np.pi / self.vacuum_wavelength_nm

    @property
    def layer_count(self) -> int:
        return len(self.films) + 2

    def medium_at(self, layer_index: int) -> Medium:
        if layer_index == 0:
            return self.incidence_medium
        if 1 <= layer_index <= len(self.films):
            return self.films[layer_index - 1].medium
        if layer_index == len(self.films) + 1:
            return self.exit_medium
        raise IndexError(
            f"Layer index {layer_index} out of range for a stack with {self.layer_count} layers"
        )

    def thickness_at(self, layer_index: int) -> float:
        """Film thickness in nm; half-spaces report 0."""
        if 1 <= layer_index <= len(self.films):
            return self.films[layer_index - 1].thickness_nm
        self.medium_at(layer_index)
        return 0.0

    def with_exit_index(self, index: float) -> "LayerStack":
        """Return a copy whose transparent exit medium has the given refractive index."""
        return replace(self, exit_medium=Medium.from_index(self.exit_medium.label, index))

    def with_film_thickness(self, film_position: int, thickness_nm: float) -> "LayerStack":
        films: List[Film] = list(self.films)
        films[film_position] = Film(films[film_position].medium, thickness_nm)
        return replace(self, films=tuple(films))

    def to_dict(self) -> Dict:
        return {
            "incidence_medium": self.incidence_medium.to_dict(),
            "films": [
                {**film.medium.to_dict(), "thickness_nm": film.thickness_nm}
                for film in self.films
            ],
            "exit_medium": self.exit_medium.to_dict(),
            "vacuum_wavelength_nm": self.vacuum_wavelength_nm,
        }


def kretschmann_stack(
    prism_index: float = BK7_INDEX,
    metal_permittivity: complex = GOLD_PERMITTIVITY_795NM,
    metal_thickness_nm: float = GOLD_THICKNESS_NM,
    analyte_index: float = WATER_INDEX,
    wavelength_nm: float = LASER_WAVELENGTH_NM,
) -> LayerStack:
    """Build the prism / gold film / analyte stack of the sensor."""
    return LayerStack(
        incidence_medium=Medium.from_index("prism", prism_index),
        films=(Film(Medium("gold", metal_permittivity), metal_thickness_nm),),
        exit_medium=Medium.from_index("analyte", analyte_index),
        vacuum_wavelength_nm=wavelength_nm,
    )


def drude_permittivity(
    wavelength_nm: float,
    plasma_energy_ev: float = GOLD_DRUDE_PLASMA_EV,
    damping_ev: float = GOLD_DRUDE_DAMPING_EV,
    eps_inf: float = GOLD_DRUDE_EPS_INF,
) -> complex:
    """Free-electron permittivity eps_inf - wp^2 / (w (w + i gamma)).

    Args:
        wavelength_nm: Vacuum wavelength.
        plasma_energy_ev: Plasma energy h_bar * omega_p.
        damping_ev: Collision rate h_bar * gamma.
        eps_inf: Background (interband) permittivity.

    Returns:
        Complex permittivity with a positive imaginary (absorbing) part.

    Raises:
        ValueError: If the wavelength or plasma energy is not positive.
    """
    if wavelength_nm <= 0 or plasma_energy_ev <= 0:
        raise ValueError("Wavelength and plasma energy must be positive")

    photon_ev = HC_EV_NM / wavelength_nm
    return complex(eps_inf - plasma_energy_ev ** 2 / (photon_ev * (photon_ev + 1j * damping_ev)))
