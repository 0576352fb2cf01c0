class OpticsError(Exception):
    """Base exception for the stratified-media optics model."""


class DegenerateMediumError(OpticsError, ValueError):
    """A layer has zero permittivity, so its TM admittance is undefined."""


class BranchPointError(OpticsError, ValueError):
    """The longitudinal wavevector of a layer vanishes (grazing propagation)."""


class DegenerateAdmittanceError(OpticsError, ValueError):
    """A film has zero TM admittance and its characteristic matrix is undefined."""


class ResonanceSingularityError(OpticsError):
    """The reflection-coefficient denominator vanishes at the given angle."""

    def __init__(self, message: str, angle_deg: float = None):
        super().__init__(message)
        self.angle_deg = angle_deg


class NoResonanceError(OpticsError, ValueError):
    """No bound surface-plasmon mode can be phase matched by the prism."""
