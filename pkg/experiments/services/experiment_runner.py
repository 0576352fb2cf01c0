import logging
from typing import Any, Dict, List

import numpy as np

from detection.services import (
    COHERENT,
    MODE_INDEX,
    TMBSS,
    SnrSeries,
    difference_trace,
    point_budget,
    power_spectrum,
    snr_timeseries,
    synthesize_traces,
)
from experiments.schemas import RunConfig
from experiments.services.exceptions import ExperimentError
from experiments.services.reference_values import load_reference_values, reported_point_squeezing
from experiments.services.run_writer import RunWriter
from fitting.services import (
    KineticParameters,
    fit_gain,
    fit_kinetics,
    index_resolution,
    synthetic_sensorgram,
)
from kinetics.services import Sensorgram, sensorgram
from optics.services import DipCurve, LayerStack, reflectivity, reflectivity_sweep
from optics.services.exceptions import NoResonanceError
from quantum.services import (
    PROBE,
    SENSOR_REFLECTIVITY,
    NoiseBudget,
    TwinBeamSource,
    apply_loss_chain,
    cumulative_budgets,
    lossless_squeezing_db,
    matched_conjugate_attenuation,
)


logger = logging.getLogger(__name__)

DIP_FIELDS = ("theta_deg", "reflectivity")
SCAN_FIELDS = ("theta_deg", "reflectivity", "squeezing_db", "bare_reflectivity")
SPECTRUM_FIELDS = ("freq_hz", "power")


class ExperimentRunner:
    """Runs one command against a validated configuration and writes its outputs.

    Each command method returns a summary dictionary; its "warnings" list
    collects conditions that keep exit code 0.
    """

    def __init__(self, config: RunConfig, writer: RunWriter, threads: int = 1):
        self.config = config
        self.writer = writer
        self.threads = threads
        self.warnings: List[str] = []

    def run(self, command: str) -> Dict[str, Any]:
        self.config.require_blocks(command)
        summary = getattr(self, command)()
        summary["warnings"] = list(self.warnings)
        self.writer.finish()
        return summary

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)

    # --------------------
    # Shared builders
    # --------------------

    def build_source(self) -> TwinBeamSource:
        block = self.config.source
        if block.gain is not None:
            gain = block.gain
        else:
            gain = fit_gain(block.squeezing_db, block.squeezing_upstream_transmission)
        return TwinBeamSource(gain=gain, seed_flux=block.seed_flux)

    def sweep(self, stack: LayerStack, prism_correction: bool) -> DipCurve:
        block = self.config.optics
        return reflectivity_sweep(
            stack,
            block.sweep.theta_min_deg,
            block.sweep.theta_max_deg,
            block.sweep.step_deg,
            prism_correction=prism_correction,
            geometry=block.build_geometry(),
        )

    def buffer_stack(self) -> LayerStack:
        return self.config.optics.build_stack().with_exit_index(self.config.kinetics.n_buffer)

    def lock(self, stack: LayerStack) -> DipCurve:
        """Uncorrected dip at the buffer index, which fixes the locked angle."""
        dip = self.sweep(stack, prism_correction=False)
        if self.config.kinetics.locked_angle_deg is None and not dip.dip_found:
            raise NoResonanceError(
                "No resonance inside the sweep to lock against; widen the sweep or set locked_angle_deg"
            )
        return dip

    def locked_angle(self, dip: DipCurve) -> float:
        block = self.config.kinetics
        if block.locked_angle_deg is not None:
            return block.locked_angle_deg
        return dip.resonance_angle - block.lock_offset_deg

    def binding_sensorgram(self) -> Sensorgram:
        block = self.config.kinetics
        stack = self.buffer_stack()
        angle = self.locked_angle(self.lock(stack))
        result = sensorgram(
            block.build_model(), block.build_index_map(), stack, angle, block.build_grid(), method=block.method
        )
        if not result.locked_left_of_dip:
            self.warn(f"Locked angle {angle:.3f} deg is not left of the resonance")
        return result

    # --------------------
    # Commands
    # --------------------

    def dip(self) -> Dict[str, Any]:
        optics = self.config.optics
        curve = self.sweep(optics.build_stack(), optics.sweep.prism_correction)
        if not curve.dip_found:
            self.warn(
                f"No dip between {optics.sweep.theta_min_deg} and {optics.sweep.theta_max_deg} deg"
            )

        self.writer.write_table(
            "dip", DIP_FIELDS, [{"theta_deg": a, "reflectivity": r} for a, r in curve.to_rows()]
        )
        summary = {
            **curve.summary(),
            "warning": None if curve.dip_found else "no dip in sweep",
            "reported_resonance_angle_deg": load_reference_values()["resonance_angle_deg"],
        }
        self.writer.write_json("dip.json", summary)
        return summary

    def squeezing_scan(self) -> Dict[str, Any]:
        """Squeezing with the sensor stage set to the swept reflectivity.

        With prism_correction on, "reflectivity" includes both face
        transmissions, so even the wings stay below the source squeezing;
        "bare_reflectivity" is the uncorrected |r|^2 at the same angle.
        Angles the prism face cannot reach are skipped.
        """
        optics = self.config.optics
        source = self.build_source()
        chain = self.config.loss.build_chain()
        stack = optics.build_stack()
        curve = self.sweep(stack, optics.sweep.prism_correction)
        bare = reflectivity(stack, curve.angles)

        rows = []
        for angle, value, bare_value in zip(curve.angles, curve.reflectivity, bare):
            if value <= 0.0:
                continue
            sensor_stage = min(float(value), 1.0)
            point_chain = matched_conjugate_attenuation(chain.with_stage(SENSOR_REFLECTIVITY, sensor_stage, PROBE))
            budget = apply_loss_chain(source, point_chain, bright_seed=self.config.source.bright_seed)
            rows.append({
                "theta_deg": float(angle),
                "reflectivity": float(value),
                "squeezing_db": budget.squeezing_db,
                "bare_reflectivity": float(bare_value),
            })

        skipped = len(curve.angles) - len(rows)
        if not rows:
            raise ExperimentError("No sweep angle reaches the sensor through the prism face")
        if skipped:
            self.warn(f"Skipped {skipped} sweep angle(s) with no light on the sensor")
        self.writer.write_table("squeezing_scan", SCAN_FIELDS, rows)

        lowest = min(rows, key=lambda row: row["squeezing_db"])
        return {
            "points": len(rows),
            "prism_correction": optics.sweep.prism_correction,
            "min_squeezing_db": lowest["squeezing_db"],
            "min_squeezing_angle_deg": lowest["theta_deg"],
            "max_squeezing_db": max(row["squeezing_db"] for row in rows),
            "source_squeezing_db": lossless_squeezing_db(source.gain),
        }

    def bind(self) -> Dict[str, Any]:
        result = self.binding_sensorgram()
        self.writer.write_table("sensorgram", Sensorgram.CSV_FIELDS, result.to_rows())
        return {
            "locked_angle_deg": result.locked_angle,
            "locked_left_of_dip": result.locked_left_of_dip,
            "initial_reflectivity": float(result.reflectivity[0]),
            "final_reflectivity": float(result.reflectivity[-1]),
            "reported_lock_reflectivity": load_reference_values()["lock_reflectivity"]["binding"],
        }

    def snr(self) -> Dict[str, Any]:
        acquisition_block = self.config.acquisition
        source = self.build_source()
        chain = self.config.loss.build_chain()
        trace = self.binding_sensorgram()
        acquisition = acquisition_block.build_acquisition(self.config.rng_seed)
        modulation = acquisition_block.build_modulation()
        band = acquisition_block.build_band()
        acquisition.check_tone(modulation)

        coherent = snr_timeseries(
            trace, source, chain, modulation, acquisition, COHERENT, band, threads=self.threads
        )
        squeezed = snr_timeseries(
            trace, source, chain, modulation, acquisition, TMBSS, band, threads=self.threads, reference=coherent
        )
        self.writer.write_table("snr_tmbss", SnrSeries.CSV_FIELDS, squeezed.to_rows())
        self.writer.write_table("snr_coherent", SnrSeries.CSV_FIELDS, coherent.to_rows())
        if acquisition_block.dump_spectrum:
            for mode in (TMBSS, COHERENT):
                budget = point_budget(source, chain, float(trace.reflectivity[0]), mode)
                segment = synthesize_traces(
                    budget, modulation, acquisition, stream=(0, 0, MODE_INDEX[mode]), timestamp=float(trace.times[0])
                )
                spectrum = power_spectrum(difference_trace(segment), acquisition)
                self.writer.write_table(f"spectrum_{mode}", SPECTRUM_FIELDS, spectrum.to_rows())

        model = point_budget(source, chain, float(trace.reflectivity[0]), TMBSS)
        summary = {
            "mean_qa_db": float(np.mean(squeezed.qa_db)),
            "mean_squeezing_db": float(np.mean(squeezed.squeezing_db)),
            "model_squeezing_db": model.squeezing_db,
            "reported_qa_db": load_reference_values()["quantum_advantage_db"],
            "points": len(trace.times),
        }
        self.writer.write_json("snr_summary.json", summary)
        return summary

    def budget(self) -> Dict[str, Any]:
        source = self.build_source()
        loss = self.config.loss
        budgets: List[NoiseBudget] = cumulative_budgets(
            source, loss.build_chain(), loss.build_points(), bright_seed=self.config.source.bright_seed
        )
        self.writer.write_table("budget", NoiseBudget.CSV_FIELDS, [b.to_row() for b in budgets])

        annotations = {
            "source_squeezing_db": lossless_squeezing_db(source.gain),
            "gain": source.gain,
            "points": [
                {
                    "point_label": b.point_label,
                    "eta_probe": b.eta_probe,
                    "eta_conj": b.eta_conjugate,
                    "model_squeezing_db": b.squeezing_db,
                    "reported_squeezing_db": reported_point_squeezing(b.point_label),
                }
                for b in budgets
            ],
        }
        self.writer.write_json("budget_annotations.json", annotations)
        return annotations

    def fit(self) -> Dict[str, Any]:
        block = self.config.kinetics
        fit_block = self.config.fit
        seed = self.config.rng_seed
        stack = self.buffer_stack()
        dip = self.lock(stack)
        angle = self.locked_angle(dip)

        model = block.build_model()
        index_map = block.build_index_map()
        grid = block.build_grid()
        guess = KineticParameters(**fit_block.initial_guess.model_dump())
        squeezed_sigma = fit_block.noise_sigma * 10.0 ** (-fit_block.squeezing_db / 20.0)

        # Independent noise realisations per arm.
        noise_streams = np.random.SeedSequence(seed).spawn(2)
        arms = (("coherent", fit_block.noise_sigma), ("squeezed", squeezed_sigma))

        results = {}
        for (label, sigma), stream in zip(arms, noise_streams):
            data = synthetic_sensorgram(model, index_map, stack, angle, grid, sigma, stream)
            result = fit_kinetics(
                data, index_map, stack, angle, guess, model.schedule, model.gamma_max, fit_block.restarts, seed
            )
            if not result.converged:
                self.warn(f"The {label} fit did not converge: {result.message}")
            results[label] = result

        resolution = index_resolution(dip, angle, fit_block.noise_sigma, fit_block.squeezing_db)
        payload = {
            "truth": {"ka": block.ka, "kd": block.kd, "delta_n_max": block.delta_n_max},
            "locked_angle_deg": angle,
            "coherent": results["coherent"].to_dict(),
            "squeezed": results["squeezed"].to_dict(),
            "stderr_ratio": {
                name: results["squeezed"].stderr(name) / results["coherent"].stderr(name)
                for name in ("ka", "kd")
            },
            "index_resolution": resolution.to_dict(),
        }
        self.writer.write_json("fit.json", payload)
        return payload
