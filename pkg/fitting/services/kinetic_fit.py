import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import least_squares

from fitting.services.exceptions import DegenerateFitError
from kinetics.services import (
    BindingModel,
    ConcentrationSchedule,
    IndexMap,
    Sensorgram,
    coverage_analytic,
    index_trace,
    sensorgram,
)
from optics.services import LayerStack, exit_index_response


logger = logging.getLogger(__name__)

PARAMETER_NAMES = ("ka", "kd", "delta_n_max")
PARAMETER_UNITS = {"ka": "1/(M s)", "kd": "1/s", "delta_n_max": "RIU"}

MIN_POINTS = 10
MAX_EVALUATIONS = 200
X_TOLERANCE = 1e-8
GRADIENT_TOLERANCE = 1e-10
F_TOLERANCE = 1e-12
# Central-difference step in log-parameter space.
JACOBIAN_STEP = 1e-6
# Standard deviation of the log-space perturbation applied to restart guesses.
RESTART_SPREAD = 0.5


@dataclass(frozen=True)
class KineticParameters:
    ka: float
    kd: float
    delta_n_max: float

    def __post_init__(self):
        if min(self.ka, self.kd, self.delta_n_max) <= 0:
            raise ValueError(f"Kinetic parameters must be positive (got {self.to_dict()})")

    def as_log_array(self) -> np.ndarray:
        return np.log([self.ka, self.kd, self.delta_n_max])

    @classmethod
    def from_log_array(cls, log_values: ArrayLike) -> "KineticParameters":
        return cls(*np.exp(np.asarray(log_values, dtype=float)).tolist())

    def to_dict(self) -> Dict:
        return {"ka": self.ka, "kd": self.kd, "delta_n_max": self.delta_n_max}


@dataclass(frozen=True)
class FitParameter:
    name: str
    value: float
    stderr: float
    unit: str


@dataclass(frozen=True)
class FitResult:
    """Best-fit parameters with linearized standard errors and solver diagnostics."""
    parameters: Tuple[FitParameter, ...]
    covariance: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    optimality: float
    message: str

    def __getitem__(self, name: str) -> FitParameter:
        for parameter in self.parameters:
            if parameter.name == name:
                return parameter
        raise KeyError(name)

    def value(self, name: str) -> float:
        return self[name].value

    def stderr(self, name: str) -> float:
        return self[name].stderr

    def to_dict(self) -> Dict:
        return {
            "parameters": {
                p.name: {"value": p.value, "stderr": p.stderr, "unit": p.unit} for p in self.parameters
            },
            "covariance": self.covariance.tolist(),
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "optimality": self.optimality,
            "message": self.message,
        }


@dataclass(frozen=True)
class KineticForwardModel:
    """Locked-angle reflectivity as a function of (ka, kd, delta_n_max).

    Coverage comes from the closed-form Langmuir solution and the index map's
    n_buffer and bulk_step are held fixed.
    """
    times: np.ndarray
    schedule: ConcentrationSchedule
    index_map: IndexMap
    stack: LayerStack
    locked_angle: float
    gamma_max: float = 1.0
    gamma0: float = 0.0

    @cached_property
    def concentration(self) -> np.ndarray:
        return np.array([self.schedule.concentration_at(t) for t in self.times])

    def reflectivity(self, params: KineticParameters) -> np.ndarray:
        model = BindingModel(
            ka=params.ka,
            kd=params.kd,
            schedule=self.schedule,
            gamma_max=self.gamma_max,
            gamma0=self.gamma0,
        )
        coverage = coverage_analytic(model, self.times)
        index_map = replace(self.index_map, delta_n_max=params.delta_n_max)
        index = index_trace(coverage, index_map, self.gamma_max, self.concentration)
        return exit_index_response(self.stack, self.locked_angle, index)

    def jacobian(self, log_params: ArrayLike, step: float = JACOBIAN_STEP) -> np.ndarray:
        """Central-difference d(reflectivity)/d(log parameter), one column per parameter."""
        log_params = np.asarray(log_params, dtype=float)
        columns = []
        for position in range(log_params.size):
            shift = np.zeros_like(log_params)
            shift[position] = step
            upper = self.reflectivity(KineticParameters.from_log_array(log_params + shift))
            lower = self.reflectivity(KineticParameters.from_log_array(log_params - shift))
            columns.append((upper - lower) / (2.0 * step))
        return np.column_stack(columns)


def synthetic_sensorgram(
    model: BindingModel,
    index_map: IndexMap,
    stack: LayerStack,
    locked_angle: float,
    t_grid: ArrayLike,
    noise_sigma: float = 0.0,
    seed: Union[int, np.random.SeedSequence] = 0,
) -> Sensorgram:
    """Forward-model sensorgram with seeded white Gaussian reflectivity noise.

    seed is an integer or a spawned SeedSequence; distinct seeds give
    independent noise realisations.
    """
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0 (got {noise_sigma})")

    clean = sensorgram(model, index_map, stack, locked_angle, t_grid, method="analytic")
    if noise_sigma == 0:
        return clean

    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_sigma, clean.reflectivity.size)
    return replace(clean, reflectivity=clean.reflectivity + noise)


def _summarize(solution, point_count: int) -> FitResult:
    jacobian = solution.jac
    if np.linalg.matrix_rank(jacobian) < jacobian.shape[1]:
        raise DegenerateFitError(
            f"Jacobian has rank {np.linalg.matrix_rank(jacobian)} < {jacobian.shape[1]}; "
            f"the sensorgram does not constrain every parameter"
        )

    dof = max(point_count - jacobian.shape[1], 1)
    residual_variance = 2.0 * solution.cost / dof
    log_covariance = residual_variance * np.linalg.inv(jacobian.T @ jacobian)

    # Delta method: d(value) = value * d(log value).
    values = np.exp(solution.x)
    covariance = log_covariance * np.outer(values, values)
    covariance = 0.5 * (covariance + covariance.T)
    stderr = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    parameters = tuple(
        FitParameter(name=name, value=float(value), stderr=float(error), unit=PARAMETER_UNITS[name])
        for name, value, error in zip(PARAMETER_NAMES, values, stderr)
    )
    return FitResult(
        parameters=parameters,
        covariance=covariance,
        residual_norm=float(np.linalg.norm(solution.fun)),
        iterations=int(solution.njev if solution.njev is not None else solution.nfev),
        converged=bool(solution.success),
        optimality=float(solution.optimality),
        message=str(solution.message),
    )


def fit_kinetics(
    sensorgram_data: Sensorgram,
    index_map: IndexMap,
    stack: LayerStack,
    locked_angle: float,
    initial_guess: KineticParameters,
    schedule: ConcentrationSchedule,
    gamma_max: float = 1.0,
    restarts: int = 0,
    seed: int = 0,
) -> FitResult:
    """Recover (ka, kd, delta_n_max) from a locked-angle sensorgram.

    Damped least squares over the log-parameters, minimizing squared
    reflectivity residuals through the full optics model.

    Args:
        sensorgram_data: Observed times and reflectivities.
        index_map: Supplies n_buffer and bulk_step; delta_n_max is fitted.
        stack: Sensor stack at the buffer index.
        locked_angle: Internal interrogation angle, degrees.
        initial_guess: Positive starting parameters.
        schedule: Concentration schedule of the run.
        gamma_max: Surface capacity used by the run.
        restarts: Extra fits from log-normally perturbed guesses; the lowest
            cost wins.
        seed: Seed for the restart perturbations.

    Returns:
        FitResult with natural-unit values and standard errors.

    Raises:
        DegenerateFitError: If the Jacobian at the optimum is rank deficient.
        ValueError: If fewer than MIN_POINTS samples are given or restarts < 0.
    """
    observed = np.asarray(sensorgram_data.reflectivity, dtype=float)
    if observed.size < MIN_POINTS:
        raise ValueError(f"Need at least {MIN_POINTS} sensorgram points (got {observed.size})")
    if restarts < 0:
        raise ValueError(f"restarts must be >= 0 (got {restarts})")

    forward = KineticForwardModel(
        times=np.asarray(sensorgram_data.times, dtype=float),
        schedule=schedule,
        index_map=index_map,
        stack=stack,
        locked_angle=locked_angle,
        gamma_max=gamma_max,
    )

    def residuals(log_params: np.ndarray) -> np.ndarray:
        return forward.reflectivity(KineticParameters.from_log_array(log_params)) - observed

    first = initial_guess.as_log_array()
    rng = np.random.default_rng(seed)
    starts = [first] + [first + rng.normal(0.0, RESTART_SPREAD, first.size) for _ in range(restarts)]

    best = None
    for attempt, start in enumerate(starts):
        solution = least_squares(
            residuals,
            start,
            jac=forward.jacobian,
            method="lm",
            xtol=X_TOLERANCE,
            gtol=GRADIENT_TOLERANCE,
            ftol=F_TOLERANCE,
            max_nfev=MAX_EVALUATIONS,
        )
        logger.debug(f"Fit attempt {attempt}: cost {solution.cost:.3e}, status {solution.status}")
        if best is None or solution.cost < best.cost:
            best = solution

    result = _summarize(best, observed.size)
    if not result.converged:
        logger.warning(f"Kinetic fit did not converge: {result.message}")
    else:
        logger.info(
            f"Kinetic fit converged in {result.iterations} iteration(s): "
            f"ka={result.value('ka'):.4g}, kd={result.value('kd'):.4g}, "
            f"delta_n_max={result.value('delta_n_max'):.4g}"
        )
    return result
