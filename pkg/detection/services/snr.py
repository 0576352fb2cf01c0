import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from detection.services.acquisition import (
    AcquisitionSpec,
    ModulationSpec,
    difference_trace,
    synthesize_traces,
)
from detection.services.spectrum import (
    NOISE_FLOOR,
    AnalysisBand,
    ToneMeasurement,
    extract_signal_and_noise,
    power_spectrum,
    squeezing_from_noise_powers,
)
from kinetics.services import Sensorgram
from quantum.services import (
    PROBE,
    SENSOR_REFLECTIVITY,
    LossChain,
    NoiseBudget,
    TwinBeamSource,
    apply_loss_chain,
    matched_conjugate_attenuation,
    quantum_advantage_db,
    shot_noise_reference,
)


logger = logging.getLogger(__name__)

TMBSS = "tmbss"
COHERENT = "coherent"
MODES = (TMBSS, COHERENT)
MODE_INDEX = {TMBSS: 0, COHERENT: 1}


@dataclass(frozen=True)
class SnrSeries:
    """Signal, sideband noise and SNR of the balanced trace versus sensorgram time.

    squeezing_db and qa_db compare against the coherent series; they are
    zero for the coherent series itself.
    """
    mode: str
    times: np.ndarray
    reflectivity: np.ndarray
    signal_power: np.ndarray
    noise_power: np.ndarray
    snr: np.ndarray
    squeezing_db: np.ndarray
    qa_db: np.ndarray

    CSV_FIELDS = ("t_s", "reflectivity", "signal_power", "noise_power", "snr_db", "squeezing_db", "qa_db")

    @property
    def snr_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.snr)

    def to_rows(self) -> List[Dict]:
        return [
            dict(zip(self.CSV_FIELDS, map(float, values)))
            for values in zip(
                self.times,
                self.reflectivity,
                self.signal_power,
                self.noise_power,
                self.snr_db,
                self.squeezing_db,
                self.qa_db,
            )
        ]


def measure_point(
    budget: NoiseBudget,
    modulation: ModulationSpec,
    acquisition: AcquisitionSpec,
    band: AnalysisBand = AnalysisBand(),
    time_index: int = 0,
    mode: str = TMBSS,
    timestamp: float = 0.0,
) -> ToneMeasurement:
    """Average tone and sideband powers over segments_per_point synthesized segments.

    Each segment draws from its own (time_index, segment, mode) stream.
    """
    signal, noise = [], []
    floor_hit = False
    for segment in range(acquisition.segments_per_point):
        trace = synthesize_traces(
            budget,
            modulation,
            acquisition,
            stream=(time_index, segment, MODE_INDEX[mode]),
            timestamp=timestamp,
        )
        measurement = extract_signal_and_noise(power_spectrum(difference_trace(trace), acquisition), modulation, band)
        signal.append(measurement.signal_power)
        noise.append(measurement.noise_power)
        floor_hit = floor_hit or measurement.noise_floor_hit

    signal_power = float(np.mean(signal))
    noise_power = float(np.mean(noise))
    return ToneMeasurement(
        signal_power=signal_power,
        noise_power=noise_power,
        tone_bin=measurement.tone_bin,
        snr=signal_power / max(noise_power, NOISE_FLOOR),
        noise_floor_hit=floor_hit,
    )


def point_budget(source: TwinBeamSource, chain: LossChain, reflectivity: float, mode: str) -> NoiseBudget:
    """Detected budget with the probe's sensor stage set to the current reflectivity.

    The conjugate is attenuated to match the probe; the coherent mode keeps the
    same detected means with Poissonian, uncorrelated noise.
    """
    point_chain = matched_conjugate_attenuation(chain.with_stage(SENSOR_REFLECTIVITY, reflectivity, PROBE))
    budget = apply_loss_chain(source, point_chain)
    if mode == COHERENT:
        return shot_noise_reference(budget)
    return budget


def snr_timeseries(
    sensorgram: Sensorgram,
    source: TwinBeamSource,
    chain: LossChain,
    modulation: ModulationSpec,
    acquisition: AcquisitionSpec,
    mode: str = TMBSS,
    band: AnalysisBand = AnalysisBand(),
    threads: int = 1,
    reference: Optional[SnrSeries] = None,
) -> SnrSeries:
    """SNR of the balanced trace at every sensorgram timestamp.

    Args:
        sensorgram: Supplies the time-varying probe reflectivity.
        source: Twin-beam source.
        chain: Base loss chain; its sensor stage is overwritten per timestamp.
        modulation: Tone parameters.
        acquisition: Sampling parameters and run seed.
        mode: "tmbss" or "coherent".
        band: Sideband noise band.
        threads: Worker threads; results do not depend on the count.
        reference: Coherent series for the squeezing and advantage columns of a
            tmbss series. Computed here when omitted.

    Returns:
        SnrSeries for the requested mode.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode '{mode}'; expected one of {MODES}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1 (got {threads})")

    def evaluate(time_index: int) -> ToneMeasurement:
        reflectivity = float(sensorgram.reflectivity[time_index])
        budget = point_budget(source, chain, reflectivity, mode)
        return measure_point(
            budget,
            modulation,
            acquisition,
            band,
            time_index=time_index,
            mode=mode,
            timestamp=float(sensorgram.times[time_index]),
        )

    indices = range(len(sensorgram.times))
    if threads == 1:
        measurements = [evaluate(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            measurements = list(pool.map(evaluate, indices))

    signal_power = np.array([m.signal_power for m in measurements])
    noise_power = np.array([m.noise_power for m in measurements])
    snr = np.array([m.snr for m in measurements])
    logger.info(f"Measured {len(measurements)} {mode} point(s), mean SNR {np.mean(snr):.3e}")

    if mode == COHERENT:
        zeros = np.zeros(len(measurements))
        squeezing, advantage = zeros, zeros.copy()
    else:
        if reference is None:
            reference = snr_timeseries(
                sensorgram, source, chain, modulation, acquisition, COHERENT, band, threads
            )
        squeezing = np.array([
            squeezing_from_noise_powers(n, n_coh) for n, n_coh in zip(noise_power, reference.noise_power)
        ])
        advantage = np.array([
            quantum_advantage_db(s, s_coh) for s, s_coh in zip(snr, reference.snr)
        ])

    return SnrSeries(
        mode=mode,
        times=np.asarray(sensorgram.times, dtype=float),
        reflectivity=np.asarray(sensorgram.reflectivity, dtype=float),
        signal_power=signal_power,
        noise_power=noise_power,
        snr=snr,
        squeezing_db=squeezing,
        qa_db=advantage,
    )
