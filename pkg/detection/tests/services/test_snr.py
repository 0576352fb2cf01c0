import time

import numpy as np
import pytest

from detection.services import (
    COHERENT,
    TMBSS,
    AcquisitionSpec,
    ModulationSpec,
    SnrSeries,
    measure_point,
    snr_timeseries,
    squeezing_from_noise_powers,
)
from kinetics.services import Sensorgram
from quantum.services import (
    CELL_WINDOW,
    PATH_OPTICS,
    LossChain,
    LossStage,
    TwinBeamSource,
    apply_loss_chain,
    quantum_advantage_db,
    shot_noise_reference,
)


SEED_FLUX = 1e8


def flat_sensorgram(reflectivity, points):
    times = np.arange(points, dtype=float)
    return Sensorgram(
        times=times,
        coverage=np.zeros(points),
        index=np.full(points, 1.33),
        reflectivity=np.full(points, reflectivity) if np.isscalar(reflectivity) else np.asarray(reflectivity),
        locked_angle=65.5,
    )


def source_for_squeezing(squeezing_db):
    return TwinBeamSource(gain=(10 ** (squeezing_db / 10) + 1) / 2, seed_flux=SEED_FLUX)


class TestMeasurePoint:
    def setup_method(self):
        self.acquisition = AcquisitionSpec(sample_rate=12.5e6, segment_length=4096, segments_per_point=100, rng_seed=5)
        self.modulation = ModulationSpec()

    @pytest.mark.parametrize("squeezing_in", [0.0, 2.0, 4.0, 7.8])
    def test_configured_squeezing_is_recovered(self, squeezing_in):
        budget = apply_loss_chain(source_for_squeezing(squeezing_in), LossChain())

        squeezed = measure_point(budget, self.modulation, self.acquisition, mode=TMBSS)
        coherent = measure_point(shot_noise_reference(budget), self.modulation, self.acquisition, mode=COHERENT)

        recovered = -10 * np.log10(squeezed.noise_power / coherent.noise_power)
        assert recovered == pytest.approx(squeezing_in, abs=0.2)

    def test_coherent_noise_is_linear_in_mean_power(self):
        budget = apply_loss_chain(TwinBeamSource(gain=1.0, seed_flux=SEED_FLUX), LossChain())
        brighter = apply_loss_chain(TwinBeamSource(gain=1.0, seed_flux=10 * SEED_FLUX), LossChain())

        dim = measure_point(budget, self.modulation, self.acquisition, mode=COHERENT)
        bright = measure_point(brighter, self.modulation, self.acquisition, mode=COHERENT)

        assert bright.noise_power / dim.noise_power == pytest.approx(10.0, rel=0.05)

    def test_signal_is_stable_across_segments(self):
        budget = apply_loss_chain(source_for_squeezing(4.0), LossChain())

        measurement = measure_point(budget, self.modulation, self.acquisition)

        assert measurement.snr == pytest.approx(measurement.signal_power / measurement.noise_power)
        assert not measurement.noise_floor_hit


class TestPipelineRoundTrip:
    SEGMENTS = 400
    SQUEEZING_DB = (0.0, 2.0, 4.0, 7.8)

    def test_default_acquisition_recovers_squeezing_in_time(self):
        acquisition = AcquisitionSpec(segments_per_point=self.SEGMENTS, rng_seed=17)
        modulation = ModulationSpec()

        start = time.perf_counter()
        results = {}
        for squeezing_in in self.SQUEEZING_DB:
            budget = apply_loss_chain(source_for_squeezing(squeezing_in), LossChain())
            squeezed = measure_point(budget, modulation, acquisition, mode=TMBSS)
            coherent = measure_point(shot_noise_reference(budget), modulation, acquisition, mode=COHERENT)
            results[squeezing_in] = (squeezed, coherent)
        elapsed = time.perf_counter() - start

        for squeezing_in, (squeezed, coherent) in results.items():
            recovered = squeezing_from_noise_powers(squeezed.noise_power, coherent.noise_power)
            assert recovered == pytest.approx(squeezing_in, abs=0.2)

        squeezed, coherent = results[4.0]
        advantage = quantum_advantage_db(squeezed.snr, coherent.snr)
        assert advantage == pytest.approx(
            squeezing_from_noise_powers(squeezed.noise_power, coherent.noise_power), abs=0.1
        )
        assert elapsed < 60.0


class TestSnrTimeseries:
    REFLECTIVITY = 0.41

    def setup_method(self):
        self.acquisition = AcquisitionSpec(sample_rate=12.5e6, segment_length=4096, segments_per_point=64, rng_seed=9)
        self.modulation = ModulationSpec()
        self.source = TwinBeamSource(gain=3.51, seed_flux=SEED_FLUX)
        self.chain = LossChain(probe_stages=(LossStage(PATH_OPTICS, 0.26 / self.REFLECTIVITY),))

    def test_coherent_flat_sensorgram_gives_flat_snr(self):
        series = snr_timeseries(
            flat_sensorgram(self.REFLECTIVITY, 5), self.source, self.chain, self.modulation, self.acquisition, COHERENT
        )

        assert isinstance(series, SnrSeries)
        assert np.std(series.snr) / np.mean(series.snr) < 0.05
        np.testing.assert_array_equal(series.qa_db, 0.0)

    def test_advantage_matches_model_squeezing_at_total_loss(self):
        series = snr_timeseries(
            flat_sensorgram(self.REFLECTIVITY, 3), self.source, self.chain, self.modulation, self.acquisition, TMBSS
        )

        expected = apply_loss_chain(self.source, LossChain.symmetric(0.26)).squeezing_db
        assert np.all(np.abs(series.qa_db - expected) < 0.2)
        assert np.all(np.abs(series.squeezing_db - expected) < 0.2)

    def test_thread_count_does_not_change_results(self):
        sensorgram = flat_sensorgram(np.linspace(0.41, 0.43, 4), 4)
        acquisition = AcquisitionSpec(sample_rate=12.5e6, segment_length=4096, segments_per_point=4, rng_seed=9)

        serial = snr_timeseries(sensorgram, self.source, self.chain, self.modulation, acquisition, threads=1)
        pooled = snr_timeseries(sensorgram, self.source, self.chain, self.modulation, acquisition, threads=3)

        np.testing.assert_array_equal(serial.snr, pooled.snr)
        np.testing.assert_array_equal(serial.qa_db, pooled.qa_db)

    def test_binding_run_keeps_advantage_gap(self):
        chain = LossChain(probe_stages=(LossStage(CELL_WINDOW, 0.92),))
        sensorgram = flat_sensorgram(np.linspace(0.41, 0.43, 6), 6)
        acquisition = AcquisitionSpec(sample_rate=12.5e6, segment_length=4096, segments_per_point=128, rng_seed=9)

        coherent = snr_timeseries(sensorgram, self.source, chain, self.modulation, acquisition, COHERENT)
        squeezed = snr_timeseries(sensorgram, self.source, chain, self.modulation, acquisition, TMBSS, reference=coherent)

        assert squeezed.snr[-1] > squeezed.snr[0]
        assert coherent.snr[-1] > coherent.snr[0]
        assert np.all(np.abs(squeezed.qa_db - squeezed.qa_db[0]) < 0.3)

    def test_rows_use_csv_columns(self):
        acquisition = AcquisitionSpec(sample_rate=12.5e6, segment_length=4096, segments_per_point=2)
        series = snr_timeseries(
            flat_sensorgram(self.REFLECTIVITY, 2), self.source, self.chain, self.modulation, acquisition, COHERENT
        )

        rows = series.to_rows()

        assert tuple(rows[0]) == SnrSeries.CSV_FIELDS
        assert rows[1]["t_s"] == 1.0

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            snr_timeseries(
                flat_sensorgram(self.REFLECTIVITY, 2), self.source, self.chain, self.modulation, self.acquisition, "homodyne"
            )
