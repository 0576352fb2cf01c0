import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import ArrayLike

from kinetics.services.exceptions import NegativeTimeError, TimeGridError


logger = logging.getLogger(__name__)

# Largest (ka C + kd) dt taken by one RK4 step before sub-stepping kicks in,
# and the per-step value used once it does.
MAX_STEP_STIFFNESS = 0.1
SUBSTEP_STIFFNESS = 0.02


@dataclass(frozen=True)
class ConcentrationStep:
    start_s: float
    concentration_molar: float


@dataclass(frozen=True)
class ConcentrationSchedule:
    """Piecewise-constant analyte concentration.

    C(t) is the concentration of the last step starting at or before t, and
    zero before the first step.
    """
    steps: Tuple[ConcentrationStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        steps = tuple(
            s if isinstance(s, ConcentrationStep) else ConcentrationStep(*s) for s in self.steps
        )
        object.__setattr__(self, "steps", steps)

        starts = [s.start_s for s in steps]
        if any(later <= earlier for earlier, later in zip(starts, starts[1:])):
            raise ValueError(f"Schedule step starts must be strictly increasing (got {starts})")
        if any(s.concentration_molar < 0 for s in steps):
            raise ValueError("Schedule concentrations must be >= 0")

    @classmethod
    def constant(cls, concentration_molar: float) -> "ConcentrationSchedule":
        return cls(steps=(ConcentrationStep(0.0, concentration_molar),))

    @classmethod
    def association_dissociation(cls, concentration_molar: float, switch_s: float) -> "ConcentrationSchedule":
        """Inject at t = 0, switch to running buffer at switch_s."""
        return cls(steps=(
            ConcentrationStep(0.0, concentration_molar),
            ConcentrationStep(switch_s, 0.0),
        ))

    def concentration_at(self, t: float) -> float:
        current = 0.0
        for step in self.steps:
            if step.start_s > t:
                break
            current = step.concentration_molar
        return current

    def breakpoints_between(self, t_start: float, t_end: float) -> List[float]:
        """Step starts strictly inside (t_start, t_end)."""
        return [s.start_s for s in self.steps if t_start < s.start_s < t_end]

    def to_dict(self) -> Dict:
        return {
            "steps": [
                {"start_s": s.start_s, "concentration_molar": s.concentration_molar} for s in self.steps
            ]
        }


@dataclass(frozen=True)
class BindingModel:
    """Langmuir 1:1 surface binding, dGamma/dt = ka C(t) (Gamma_max - Gamma) - kd Gamma."""
    ka: float
    kd: float
    schedule: ConcentrationSchedule
    gamma_max: float = 1.0
    gamma0: float = 0.0
    sample_label: str = ""

    def __post_init__(self):
        if self.ka < 0 or self.kd < 0:
            raise ValueError(f"Rate constants must be >= 0 (got ka={self.ka}, kd={self.kd})")
        if self.gamma_max <= 0:
            raise ValueError(f"gamma_max must be > 0 (got {self.gamma_max})")
        if not 0 <= self.gamma0 <= self.gamma_max:
            raise ValueError(f"gamma0 must lie in [0, {self.gamma_max}] (got {self.gamma0})")

    def rate(self, concentration: float) -> float:
        return self.ka * concentration + self.kd

    def derivative(self, gamma: float, concentration: float) -> float:
        return self.ka * concentration * (self.gamma_max - gamma) - self.kd * gamma

    def to_dict(self) -> Dict:
        return {
            "ka": self.ka,
            "kd": self.kd,
            "gamma_max": self.gamma_max,
            "gamma0": self.gamma0,
            "sample_label": self.sample_label,
            "schedule": self.schedule.to_dict(),
        }


def time_grid(duration_s: float, step_s: float) -> np.ndarray:
    """Uniform grid from 0 to duration_s inclusive."""
    if duration_s <= 0 or step_s <= 0:
        raise TimeGridError(f"Duration and step must be > 0 (got {duration_s}, {step_s})")
    count = int(np.floor(duration_s / step_s + 1e-9)) + 1
    return step_s * np.arange(count)


def _relax(model: BindingModel, gamma, concentration: float, elapsed):
    rate = model.rate(concentration)
    if rate == 0:
        return gamma + np.zeros_like(elapsed)
    equilibrium = model.gamma_max * model.ka * concentration / rate
    return equilibrium + (gamma - equilibrium) * np.exp(-rate * elapsed)


def coverage_analytic(model: BindingModel, t: ArrayLike) -> np.ndarray:
    """Closed-form Langmuir coverage, composed segment by segment over the schedule.

    On a constant-concentration schedule this is
    Gamma_eq + (Gamma0 - Gamma_eq) exp(-(ka C + kd) t).

    Raises:
        NegativeTimeError: If any time is negative.
    """
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise NegativeTimeError("Coverage is defined for t >= 0 only")

    result = np.empty(times.shape)
    starts = [0.0] + [s.start_s for s in model.schedule.steps if s.start_s > 0]
    ends = starts[1:] + [np.inf]
    gamma = model.gamma0

    for start, end in zip(starts, ends):
        concentration = model.schedule.concentration_at(start)
        inside = (times >= start) & (times < end)
        result[inside] = _relax(model, gamma, concentration, times[inside] - start)
        if np.isfinite(end):
            gamma = float(_relax(model, gamma, concentration, end - start))
    return result


def _rk4_step(model: BindingModel, gamma: float, concentration: float, dt: float) -> float:
    k1 = model.derivative(gamma, concentration)
    k2 = model.derivative(gamma + 0.5 * dt * k1, concentration)
    k3 = model.derivative(gamma + 0.5 * dt * k2, concentration)
    k4 = model.derivative(gamma + dt * k3, concentration)
    return gamma + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def coverage_ode(model: BindingModel, t_grid: ArrayLike) -> np.ndarray:
    """Fixed-step RK4 coverage on t_grid.

    Every grid interval is split at schedule switches so no step straddles a
    concentration change, and is further sub-stepped wherever
    (ka C + kd) dt would exceed MAX_STEP_STIFFNESS.

    Raises:
        TimeGridError: If the grid is empty or not strictly increasing.
        NegativeTimeError: If the grid starts before t = 0.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise TimeGridError("Time grid must be a non-empty 1-D array")
    if np.any(np.diff(times) <= 0):
        raise TimeGridError("Time grid must be strictly increasing")
    if times[0] < 0:
        raise NegativeTimeError(f"Time grid starts at {times[0]} s, before the run")

    coverage = np.empty(times.size)
    gamma = model.gamma0
    previous = 0.0
    substepped = 0

    for index, target in enumerate(times):
        edges = [previous] + model.schedule.breakpoints_between(previous, target) + [float(target)]
        for start, end in zip(edges, edges[1:]):
            span = end - start
            if span <= 0:
                continue
            concentration = model.schedule.concentration_at(start)
            stiffness = model.rate(concentration) * span
            count = 1
            if stiffness > MAX_STEP_STIFFNESS * (1 + 1e-9):
                count = math.ceil(stiffness / SUBSTEP_STIFFNESS)
                substepped += 1
            dt = span / count
            for _ in range(count):
                gamma = _rk4_step(model, gamma, concentration, dt)
        coverage[index] = gamma
        previous = float(target)

    if substepped:
        logger.warning(
            f"RK4 step exceeded (ka C + kd) dt = {MAX_STEP_STIFFNESS} on {substepped} "
            f"interval(s); sub-stepped for stability"
        )
    return coverage
