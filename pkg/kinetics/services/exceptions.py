class KineticsError(Exception):
    """Base exception for the surface binding model."""


class NegativeTimeError(KineticsError, ValueError):
    """Coverage was requested before the start of the run."""


class TimeGridError(KineticsError, ValueError):
    """Integration grid is empty or not strictly increasing."""
