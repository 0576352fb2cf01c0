from .acquisition import (
    AcquisitionSpec,
    DetectorTrace,
    ModulationSpec,
    difference_trace,
    segment_rng,
    synthesize_traces,
)
from .snr import (
    COHERENT,
    MODE_INDEX,
    TMBSS,
    SnrSeries,
    measure_point,
    point_budget,
    snr_timeseries,
)
from .spectrum import (
    NOISE_FLOOR,
    AnalysisBand,
    Spectrum,
    ToneMeasurement,
    extract_signal_and_noise,
    power_spectrum,
    squeezing_from_noise_powers,
)
