from .figures_of_merit import (
    from_db,
    lossless_squeezing_db,
    quantum_advantage_db,
    squeezing_db,
    symmetric_loss_squeezing_db,
    to_db,
)
from .gaussian_oracle import covariance_oracle_variance
from .loss_chain import (
    CELL_WINDOW,
    CONJUGATE,
    DETECTOR_EFFICIENCY,
    PATH_OPTICS,
    PROBE,
    SENSOR_REFLECTIVITY,
    LossChain,
    LossPoint,
    LossStage,
    NoiseBudget,
    apply_loss_chain,
    attenuate,
    budget_from_moments,
    cumulative_budgets,
    matched_conjugate_attenuation,
    optimal_conjugate_transmission,
    shot_noise_reference,
)
from .twin_beam import (
    BeamMoments,
    TwinBeamSource,
    gain_to_squeeze_param,
    twin_beam_moments,
)
