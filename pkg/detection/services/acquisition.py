from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from detection.services.exceptions import AnalysisBandError, BudgetInconsistencyError, SegmentLengthError
from quantum.services import NoiseBudget


DEFAULT_TONE_HZ = 2e6
DEFAULT_SAMPLE_RATE_HZ = 50e6
DEFAULT_SEGMENT_LENGTH = 2 ** 14

# (timestamp index, segment index, mode index)
StreamKey = Tuple[int, int, int]


@dataclass(frozen=True)
class ModulationSpec:
    """Intensity modulation imprinted on the probe by the acousto-optic modulator."""
    tone_frequency: float = DEFAULT_TONE_HZ
    modulation_depth: float = 0.05

    def __post_init__(self):
        if self.tone_frequency <= 0:
            raise ValueError(f"Tone frequency must be > 0 Hz (got {self.tone_frequency})")
        if not 0 < self.modulation_depth < 1:
            raise ValueError(f"Modulation depth must lie in (0, 1) (got {self.modulation_depth})")


@dataclass(frozen=True)
class AcquisitionSpec:
    sample_rate: float = DEFAULT_SAMPLE_RATE_HZ
    segment_length: int = DEFAULT_SEGMENT_LENGTH
    segments_per_point: int = 16
    rng_seed: int = 0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"Sample rate must be > 0 Hz (got {self.sample_rate})")
        if not is_power_of_two(self.segment_length):
            raise SegmentLengthError(f"Segment length must be a power of two (got {self.segment_length})")
        if self.segments_per_point < 1:
            raise ValueError(f"segments_per_point must be >= 1 (got {self.segments_per_point})")

    @property
    def bin_width_hz(self) -> float:
        return self.sample_rate / self.segment_length

    @property
    def sample_times(self) -> np.ndarray:
        return np.arange(self.segment_length) / self.sample_rate

    def check_tone(self, modulation: ModulationSpec) -> None:
        """Raises AnalysisBandError if the tone is at or above Nyquist."""
        if self.sample_rate <= 2 * modulation.tone_frequency:
            raise AnalysisBandError(
                f"Sample rate {self.sample_rate:g} Hz must exceed twice the tone "
                f"frequency {modulation.tone_frequency:g} Hz"
            )


@dataclass(frozen=True)
class DetectorTrace:
    """One segment of probe and conjugate photodetector samples."""
    probe: np.ndarray
    conjugate: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self):
        if len(self.probe) != len(self.conjugate):
            raise ValueError("Probe and conjugate traces must have equal lengths")
        if not (np.all(np.isfinite(self.probe)) and np.all(np.isfinite(self.conjugate))):
            raise ValueError("Detector traces must be finite")


def is_power_of_two(value: int) -> bool:
    return isinstance(value, (int, np.integer)) and value > 0 and value & (value - 1) == 0


def segment_rng(acquisition: AcquisitionSpec, stream: Sequence[int]) -> np.random.Generator:
    """Independent generator for one (timestamp, segment, mode) stream of the run seed."""
    return np.random.default_rng(np.random.SeedSequence([acquisition.rng_seed, *stream]))


def _detector_scale(budget: NoiseBudget, length: int, dc_levels: Optional[Tuple[float, float]]) -> float:
    """Trace units per detected photon per sample."""
    if dc_levels is None:
        return 1.0

    dc_probe, dc_conjugate = dc_levels
    if budget.mean_probe <= 0:
        raise BudgetInconsistencyError("DC levels need a budget with a non-zero probe mean")
    scale = dc_probe * length / budget.mean_probe
    expected_conjugate = scale * budget.mean_conjugate / length
    if not np.isclose(dc_conjugate, expected_conjugate, rtol=1e-9, atol=1e-12):
        raise BudgetInconsistencyError(
            f"Conjugate DC level {dc_conjugate:g} does not match the budget "
            f"(expected {expected_conjugate:g} at the probe's scale)"
        )
    return scale


def synthesize_traces(
    budget: NoiseBudget,
    modulation: ModulationSpec,
    acquisition: AcquisitionSpec,
    dc_levels: Optional[Tuple[float, float]] = None,
    stream: StreamKey = (0, 0, 0),
    common_mode: Optional[ArrayLike] = None,
    timestamp: float = 0.0,
) -> DetectorTrace:
    """Draw one segment of detector samples for a noise budget.

    The budget's photon numbers refer to one segment, so each sample carries
    mean / L photons and the white per-sample noise covariance is
    [[Var_p, Cov], [Cov, Var_c]] / L. The tone rides on the probe only.

    Args:
        budget: Detected photon statistics per segment.
        modulation: Tone frequency and depth.
        acquisition: Sampling parameters and run seed.
        dc_levels: Optional (probe, conjugate) DC levels in trace units; both
            must correspond to one common detector scale.
        stream: Seed-sequence key selecting an independent random stream.
        common_mode: Optional drift added to both beams.
        timestamp: Sensorgram time of this acquisition.

    Raises:
        BudgetInconsistencyError: If the covariance is not positive
            semi-definite or the DC levels disagree with the budget.
    """
    acquisition.check_tone(modulation)
    length = acquisition.segment_length
    scale = _detector_scale(budget, length, dc_levels)

    covariance = np.array([
        [budget.var_probe, budget.covariance],
        [budget.covariance, budget.var_conjugate],
    ]) * scale ** 2 / length
    eigenvalues = np.linalg.eigvalsh(covariance)
    if eigenvalues[0] < -1e-9 * max(abs(eigenvalues[1]), 1.0):
        raise BudgetInconsistencyError(
            f"Noise covariance is not positive semi-definite (eigenvalues {eigenvalues})"
        )

    dc_probe = scale * budget.mean_probe / length
    dc_conjugate = scale * budget.mean_conjugate / length
    tone = np.sin(2.0 * np.pi * modulation.tone_frequency * acquisition.sample_times)

    noise = segment_rng(acquisition, stream).multivariate_normal(
        np.zeros(2), covariance, size=length, method="eigh"
    )
    probe = dc_probe * (1.0 + modulation.modulation_depth * tone) + noise[:, 0]
    conjugate = dc_conjugate + noise[:, 1]

    if common_mode is not None:
        drift = np.asarray(common_mode, dtype=float)
        probe = probe + drift
        conjugate = conjugate + drift

    return DetectorTrace(probe=probe, conjugate=conjugate, timestamp=timestamp)


def difference_trace(trace: DetectorTrace) -> np.ndarray:
    """Balanced detection output, probe minus conjugate."""
    return trace.probe - trace.conjugate
