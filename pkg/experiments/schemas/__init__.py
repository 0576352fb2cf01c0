from .run_config_schema import (
    COMMAND_BLOCKS,
    AcquisitionConfig,
    ComplexValue,
    DrudeConfig,
    FitConfig,
    InitialGuessConfig,
    KineticsConfig,
    LossConfig,
    LossPointConfig,
    LossStageConfig,
    OpticsConfig,
    RunConfig,
    SourceConfig,
    SweepConfig,
)
