from .binding import (
    BindingModel,
    ConcentrationSchedule,
    ConcentrationStep,
    coverage_analytic,
    coverage_ode,
    time_grid,
)
from .sensorgram import (
    IndexMap,
    Sensorgram,
    index_trace,
    lock_is_left_of_dip,
    sensorgram,
)
