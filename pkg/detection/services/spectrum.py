import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from numpy.typing import ArrayLike
from scipy.signal import get_window, periodogram

from detection.services.acquisition import AcquisitionSpec, ModulationSpec, is_power_of_two
from detection.services.exceptions import AnalysisBandError, NoisePowerDomainError, SegmentLengthError


logger = logging.getLogger(__name__)

WINDOW = "hann"
NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """One-sided power per bin of a Hann-windowed segment.

    Amplitude-normalized: a bin-centred tone of amplitude A reads A^2 / 2.
    Dividing the summed power by enbw_bins recovers the window-corrected
    time-domain power sum((w x)^2) / sum(w^2).
    """
    frequencies: np.ndarray
    power: np.ndarray
    enbw_bins: float
    bin_width_hz: float

    def bin_of(self, frequency_hz: float) -> int:
        return int(round(frequency_hz / self.bin_width_hz))

    def to_rows(self) -> List[Dict]:
        return [{"freq_hz": float(f), "power": float(p)} for f, p in zip(self.frequencies, self.power)]


@dataclass(frozen=True)
class AnalysisBand:
    """Sideband region used for the noise estimate.

    Bins whose distance from the tone lies in [inner_offset_hz, outer_offset_hz]
    on either side, minus the tone +/- exclusion_halfwidth bins and everything
    below dc_cutoff_hz.
    """
    inner_offset_hz: float = 50e3
    outer_offset_hz: float = 500e3
    exclusion_halfwidth_bins: int = 3
    dc_cutoff_hz: float = 100e3

    def __post_init__(self):
        if self.exclusion_halfwidth_bins < 1:
            raise AnalysisBandError(
                f"Tone exclusion half-width must be >= 1 bin (got {self.exclusion_halfwidth_bins})"
            )
        if not 0 <= self.inner_offset_hz < self.outer_offset_hz:
            raise AnalysisBandError(
                f"Sideband offsets must satisfy 0 <= inner < outer "
                f"(got {self.inner_offset_hz}, {self.outer_offset_hz})"
            )

    def noise_mask(self, spectrum: Spectrum, tone_bin: int) -> np.ndarray:
        bins = np.arange(len(spectrum.frequencies))
        offset = np.abs(spectrum.frequencies - spectrum.frequencies[tone_bin])
        mask = (offset >= self.inner_offset_hz) & (offset <= self.outer_offset_hz)
        mask &= np.abs(bins - tone_bin) > self.exclusion_halfwidth_bins
        mask &= spectrum.frequencies >= self.dc_cutoff_hz
        return mask


@dataclass(frozen=True)
class ToneMeasurement:
    signal_power: float
    noise_power: float
    tone_bin: int
    snr: float
    noise_floor_hit: bool = False


def power_spectrum(trace: ArrayLike, acquisition: AcquisitionSpec) -> Spectrum:
    """Hann-windowed one-sided periodogram of one segment.

    Raises:
        SegmentLengthError: If the trace length differs from the segment
            length or is not a power of two.
    """
    samples = np.asarray(trace, dtype=float)
    length = samples.shape[-1]
    if length != acquisition.segment_length or not is_power_of_two(length):
        raise SegmentLengthError(
            f"Trace has {length} samples; expected the power-of-two segment length "
            f"{acquisition.segment_length}"
        )

    frequencies, power = periodogram(
        samples,
        fs=acquisition.sample_rate,
        window=WINDOW,
        detrend=False,
        return_onesided=True,
        scaling="spectrum",
    )
    window = get_window(WINDOW, length)
    enbw_bins = length * np.sum(window ** 2) / np.sum(window) ** 2

    return Spectrum(
        frequencies=frequencies,
        power=power,
        enbw_bins=float(enbw_bins),
        bin_width_hz=acquisition.bin_width_hz,
    )


def extract_signal_and_noise(
    spectrum: Spectrum,
    modulation: ModulationSpec,
    band: AnalysisBand = AnalysisBand(),
) -> ToneMeasurement:
    """Peak power at the tone and mean sideband noise power per bin.

    The signal is the largest bin within one bin of the nominal tone bin.
    When the noise sits below NOISE_FLOOR the SNR is computed against the
    floor and the measurement is flagged.

    Raises:
        AnalysisBandError: If the tone lies outside the spectrum or no
            sideband bins remain after the exclusions.
    """
    nominal = spectrum.bin_of(modulation.tone_frequency)
    if not 1 <= nominal < len(spectrum.power) - 1:
        raise AnalysisBandError(
            f"Tone at {modulation.tone_frequency:g} Hz falls outside the spectrum"
        )

    candidates = spectrum.power[nominal - 1:nominal + 2]
    tone_bin = nominal - 1 + int(np.argmax(candidates))
    signal_power = float(spectrum.power[tone_bin])

    mask = band.noise_mask(spectrum, tone_bin)
    if not np.any(mask):
        raise AnalysisBandError("Sideband analysis band is empty after exclusions")
    noise_power = float(np.mean(spectrum.power[mask]))

    floor_hit = noise_power < NOISE_FLOOR
    if floor_hit:
        logger.warning(
            f"Sideband noise power {noise_power:.3e} is below the {NOISE_FLOOR:g} floor; SNR is capped"
        )

    return ToneMeasurement(
        signal_power=signal_power,
        noise_power=noise_power,
        tone_bin=tone_bin,
        snr=signal_power / max(noise_power, NOISE_FLOOR),
        noise_floor_hit=floor_hit,
    )


def squeezing_from_noise_powers(noise_tmbss: float, noise_coh: float) -> float:
    """-10 log10 of the squeezed over the coherent noise power.

    Raises:
        NoisePowerDomainError: If either power is not positive.
    """
    if noise_tmbss <= 0 or noise_coh <= 0:
        raise NoisePowerDomainError(
            f"Noise powers must be positive (got {noise_tmbss}, {noise_coh})"
        )
    return float(-10.0 * np.log10(noise_tmbss / noise_coh))
