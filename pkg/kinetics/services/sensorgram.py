import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from numpy.typing import ArrayLike

from kinetics.services.binding import BindingModel, coverage_analytic, coverage_ode
from optics.services import LayerStack, exit_index_response, reflectivity_sweep


logger = logging.getLogger(__name__)

LOCK_SEARCH_HALF_WIDTH_DEG = 10.0


@dataclass(frozen=True)
class IndexMap:
    """Linear coverage-to-index map of the analyte layer.

    bulk_step is added while analyte flows (C(t) > 0), modelling a
    buffer/sample index mismatch.
    """
    n_buffer: float = 1.33
    delta_n_max: float = 0.0
    bulk_step: float = 0.0

    def __post_init__(self):
        if self.delta_n_max < 0:
            raise ValueError(f"delta_n_max must be >= 0 (got {self.delta_n_max})")
        if self.n_buffer <= 0:
            raise ValueError(f"n_buffer must be > 0 (got {self.n_buffer})")

    def to_dict(self) -> Dict:
        return {"n_buffer": self.n_buffer, "delta_n_max": self.delta_n_max, "bulk_step": self.bulk_step}


@dataclass(frozen=True)
class Sensorgram:
    times: np.ndarray
    coverage: np.ndarray
    index: np.ndarray
    reflectivity: np.ndarray
    locked_angle: float
    locked_left_of_dip: bool = True

    CSV_FIELDS = ("t_s", "coverage", "n3", "reflectivity")

    def __post_init__(self):
        lengths = {len(self.times), len(self.coverage), len(self.index), len(self.reflectivity)}
        if len(lengths) != 1:
            raise ValueError("Sensorgram arrays must share one length")

    def to_rows(self) -> List[Dict]:
        return [
            {"t_s": float(t), "coverage": float(c), "n3": float(n), "reflectivity": float(r)}
            for t, c, n, r in zip(self.times, self.coverage, self.index, self.reflectivity)
        ]


def index_trace(
    coverage: ArrayLike,
    index_map: IndexMap,
    gamma_max: float = 1.0,
    concentration: Optional[ArrayLike] = None,
) -> np.ndarray:
    """n3 = n_buffer + delta_n_max * Gamma / Gamma_max, plus the bulk step while C > 0.

    Raises:
        ValueError: If a coverage value lies outside [0, gamma_max].
    """
    coverage = np.asarray(coverage, dtype=float)
    tolerance = 1e-12 * gamma_max
    if np.any(coverage < -tolerance) or np.any(coverage > gamma_max + tolerance):
        raise ValueError(f"Coverage must lie in [0, {gamma_max}]")

    index = index_map.n_buffer + index_map.delta_n_max * coverage / gamma_max
    if concentration is not None and index_map.bulk_step:
        index = index + index_map.bulk_step * (np.asarray(concentration, dtype=float) > 0)
    return index


def lock_is_left_of_dip(stack: LayerStack, locked_angle: float) -> bool:
    """Whether the locked angle sits on the falling edge of the current dip."""
    dip = reflectivity_sweep(
        stack,
        max(locked_angle - LOCK_SEARCH_HALF_WIDTH_DEG, 1.0),
        min(locked_angle + LOCK_SEARCH_HALF_WIDTH_DEG, 89.0),
        prism_correction=False,
    )
    return dip.dip_found and locked_angle < dip.resonance_angle


def sensorgram(
    model: BindingModel,
    index_map: IndexMap,
    stack: LayerStack,
    locked_angle: float,
    t_grid: ArrayLike,
    method: str = "ode",
) -> Sensorgram:
    """Reflectivity at a fixed internal angle while the analyte binds.

    Args:
        model: Binding kinetics and concentration schedule.
        index_map: Coverage-to-index map.
        stack: Sensor stack; its exit index is replaced by n3(t).
        locked_angle: Internal angle, degrees.
        t_grid: Sample times, seconds.
        method: "ode" integrates with RK4, "analytic" composes closed forms.

    Returns:
        Sensorgram; locked_left_of_dip records whether the lock precedes the
        initial resonance.
    """
    times = np.asarray(t_grid, dtype=float)
    if method == "ode":
        coverage = coverage_ode(model, times)
    elif method == "analytic":
        coverage = coverage_analytic(model, times)
    else:
        raise ValueError(f"Unknown coverage method '{method}'; expected 'ode' or 'analytic'")

    concentration = np.array([model.schedule.concentration_at(t) for t in times])
    index = index_trace(coverage, index_map, model.gamma_max, concentration)

    left_of_dip = lock_is_left_of_dip(stack.with_exit_index(float(index[0])), locked_angle)
    if not left_of_dip:
        logger.warning(
            f"Locked angle {locked_angle:.3f} deg is not left of the initial resonance; "
            f"reflectivity will not rise with the analyte index"
        )

    return Sensorgram(
        times=times,
        coverage=coverage,
        index=index,
        reflectivity=exit_index_response(stack, locked_angle, index),
        locked_angle=locked_angle,
        locked_left_of_dip=left_of_dip,
    )
