from .kinetic_fit import (
    PARAMETER_NAMES,
    FitParameter,
    FitResult,
    KineticForwardModel,
    KineticParameters,
    fit_kinetics,
    synthetic_sensorgram,
)
from .resolution import (
    IndexResolution,
    index_resolution,
    reflectivity_slope,
)
from .source_calibration import fit_gain, max_squeezing_db
