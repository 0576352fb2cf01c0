import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Tuple

from scipy.optimize import minimize_scalar

from quantum.services.exceptions import UndefinedSqueezingError
from quantum.services.figures_of_merit import squeezing_db
from quantum.services.twin_beam import BeamMoments, TwinBeamSource, twin_beam_moments


logger = logging.getLogger(__name__)

PROBE = "probe"
CONJUGATE = "conjugate"
BEAMS = (PROBE, CONJUGATE)

CELL_WINDOW = "cell_window"
PATH_OPTICS = "path_optics"
SENSOR_REFLECTIVITY = "sensor_reflectivity"
DETECTOR_EFFICIENCY = "detector_efficiency"


@dataclass(frozen=True)
class LossStage:
    label: str
    transmission: float

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(
                f"Stage '{self.label}' transmission must lie in [0, 1] (got {self.transmission})"
            )


@dataclass(frozen=True)
class LossChain:
    """Ordered loss stages seen by the probe and by the conjugate."""
    probe_stages: Tuple[LossStage, ...] = field(default_factory=tuple)
    conjugate_stages: Tuple[LossStage, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "probe_stages", tuple(self.probe_stages))
        object.__setattr__(self, "conjugate_stages", tuple(self.conjugate_stages))

    @classmethod
    def symmetric(cls, transmission: float, label: str = PATH_OPTICS) -> "LossChain":
        stage = LossStage(label, transmission)
        return cls(probe_stages=(stage,), conjugate_stages=(stage,))

    @classmethod
    def from_transmissions(cls, eta_probe: float, eta_conjugate: float) -> "LossChain":
        return cls(
            probe_stages=(LossStage(PATH_OPTICS, eta_probe),),
            conjugate_stages=(LossStage(PATH_OPTICS, eta_conjugate),),
        )

    def stages(self, beam: str) -> Tuple[LossStage, ...]:
        if beam == PROBE:
            return self.probe_stages
        if beam == CONJUGATE:
            return self.conjugate_stages
        raise ValueError(f"Unknown beam '{beam}'; expected one of {BEAMS}")

    def effective_transmission(self, beam: str) -> float:
        # Sorted so any permutation of a chain gives a bit-identical product.
        return math.prod(sorted(stage.transmission for stage in self.stages(beam)))

    def with_stage(self, label: str, transmission: float, beam: str = PROBE) -> "LossChain":
        """Replace the first stage with this label on one beam, or append it."""
        stages: List[LossStage] = list(self.stages(beam))
        new_stage = LossStage(label, transmission)
        for position, stage in enumerate(stages):
            if stage.label == label:
                stages[position] = new_stage
                break
        else:
            stages.append(new_stage)

        if beam == PROBE:
            return replace(self, probe_stages=tuple(stages))
        return replace(self, conjugate_stages=tuple(stages))

    def prefix(self, probe_count: int, conjugate_count: int) -> "LossChain":
        return LossChain(
            probe_stages=self.probe_stages[:probe_count],
            conjugate_stages=self.conjugate_stages[:conjugate_count],
        )

    def to_dict(self) -> Dict:
        return {
            beam: [{"label": s.label, "transmission": s.transmission} for s in self.stages(beam)]
            for beam in BEAMS
        }


@dataclass(frozen=True)
class NoiseBudget:
    """Detected photon statistics of the intensity-difference measurement."""
    mean_probe: float
    mean_conjugate: float
    variance_diff: float
    snl: float
    squeezing_db: float
    point_label: str = ""
    eta_probe: float = 1.0
    eta_conjugate: float = 1.0
    var_probe: float = 0.0
    var_conjugate: float = 0.0
    covariance: float = 0.0

    CSV_FIELDS = ("point_label", "eta_probe", "eta_conj", "variance_diff", "snl", "squeezing_db")

    def to_row(self) -> Dict:
        return {
            "point_label": self.point_label,
            "eta_probe": self.eta_probe,
            "eta_conj": self.eta_conjugate,
            "variance_diff": self.variance_diff,
            "snl": self.snl,
            "squeezing_db": self.squeezing_db,
        }


@dataclass(frozen=True)
class LossPoint:
    """A measurement point after the first few stages of each beam."""
    label: str
    probe_stage_count: int
    conjugate_stage_count: int


def attenuate(moments: BeamMoments, eta_probe: float, eta_conjugate: float) -> BeamMoments:
    """Binomial thinning of photon-number moments by independent beamsplitter losses."""
    return BeamMoments(
        mean_probe=eta_probe * moments.mean_probe,
        mean_conjugate=eta_conjugate * moments.mean_conjugate,
        var_probe=eta_probe ** 2 * moments.var_probe + eta_probe * (1.0 - eta_probe) * moments.mean_probe,
        var_conjugate=(
            eta_conjugate ** 2 * moments.var_conjugate
            + eta_conjugate * (1.0 - eta_conjugate) * moments.mean_conjugate
        ),
        covariance=eta_probe * eta_conjugate * moments.covariance,
    )


def budget_from_moments(
    moments: BeamMoments,
    eta_probe: float = 1.0,
    eta_conjugate: float = 1.0,
    point_label: str = "",
) -> NoiseBudget:
    """Summarize detected moments as a NoiseBudget.

    Raises:
        UndefinedSqueezingError: If no light is detected.
    """
    snl = moments.mean_probe + moments.mean_conjugate
    if snl <= 0:
        raise UndefinedSqueezingError(
            f"No detected light at '{point_label or 'detector'}' "
            f"(eta_probe={eta_probe}, eta_conj={eta_conjugate})"
        )
    variance = moments.variance_difference

    return NoiseBudget(
        mean_probe=moments.mean_probe,
        mean_conjugate=moments.mean_conjugate,
        variance_diff=variance,
        snl=snl,
        squeezing_db=squeezing_db(variance, snl),
        point_label=point_label,
        eta_probe=eta_probe,
        eta_conjugate=eta_conjugate,
        var_probe=moments.var_probe,
        var_conjugate=moments.var_conjugate,
        covariance=moments.covariance,
    )


def apply_loss_chain(
    source: TwinBeamSource,
    chain: LossChain,
    point_label: str = "",
    bright_seed: bool = True,
) -> NoiseBudget:
    """Propagate the twin beams through their loss chains to the detectors.

    Raises:
        UndefinedSqueezingError: If both beams are fully attenuated.
    """
    eta_probe = chain.effective_transmission(PROBE)
    eta_conjugate = chain.effective_transmission(CONJUGATE)
    detected = attenuate(twin_beam_moments(source, bright_seed=bright_seed), eta_probe, eta_conjugate)
    return budget_from_moments(detected, eta_probe, eta_conjugate, point_label)


def matched_conjugate_attenuation(chain: LossChain) -> LossChain:
    """Give the conjugate the probe's stages so both beams lose the same fraction."""
    return replace(chain, conjugate_stages=chain.probe_stages)


def shot_noise_reference(budget: NoiseBudget) -> NoiseBudget:
    """Coherent light with the same detected means: Poissonian and uncorrelated."""
    snl = budget.mean_probe + budget.mean_conjugate
    return NoiseBudget(
        mean_probe=budget.mean_probe,
        mean_conjugate=budget.mean_conjugate,
        variance_diff=snl,
        snl=snl,
        squeezing_db=0.0,
        point_label=budget.point_label,
        eta_probe=budget.eta_probe,
        eta_conjugate=budget.eta_conjugate,
        var_probe=budget.mean_probe,
        var_conjugate=budget.mean_conjugate,
        covariance=0.0,
    )


def optimal_conjugate_transmission(
    source: TwinBeamSource,
    eta_probe: float,
    bright_seed: bool = True,
) -> float:
    """Conjugate transmission that maximizes squeezing at a fixed probe transmission."""
    if not 0.0 <= eta_probe <= 1.0:
        raise ValueError(f"Probe transmission must lie in [0, 1] (got {eta_probe})")
    moments = twin_beam_moments(source, bright_seed=bright_seed)

    def noise_ratio(eta_conjugate: float) -> float:
        detected = attenuate(moments, eta_probe, eta_conjugate)
        return detected.variance_difference / (detected.mean_probe + detected.mean_conjugate)

    result = minimize_scalar(noise_ratio, bounds=(1e-9, 1.0), method="bounded", options={"xatol": 1e-10})
    if not result.success:
        logger.warning(f"Conjugate transmission search did not converge: {result.message}")
    return float(result.x)


def cumulative_budgets(
    source: TwinBeamSource,
    chain: LossChain,
    points: Iterable[LossPoint],
    bright_seed: bool = True,
) -> List[NoiseBudget]:
    """NoiseBudget at each measurement point along the chain."""
    budgets = []
    for point in points:
        partial = chain.prefix(point.probe_stage_count, point.conjugate_stage_count)
        budgets.append(apply_loss_chain(source, partial, point.label, bright_seed=bright_seed))
    return budgets
