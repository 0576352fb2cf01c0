from unittest.mock import Mock, patch

import pytest

from experiments.schemas import RunConfig
from experiments.services.experiment_runner import DIP_FIELDS, ExperimentRunner
from experiments.services.run_writer import RunWriter
from optics.services.exceptions import NoResonanceError


class TestExperimentRunner:
    NO_DIP_SWEEP = {"theta_min_deg": 63.0, "theta_max_deg": 64.5, "step_deg": 0.05, "prism_correction": False}
    KINETICS = {"ka": 1e4, "kd": 5e-3, "concentration_molar": 1e-6, "switch_s": 30.0, "duration_s": 60.0, "step_s": 10.0}

    @pytest.fixture(autouse=True)
    def setup(self):
        self.writer = Mock(spec=RunWriter)

    def runner(self, payload, threads=1):
        return ExperimentRunner(RunConfig.model_validate(payload), self.writer, threads=threads)

    def test_run_finishes_the_writer_and_collects_warnings(self):
        runner = self.runner({"optics": {"sweep": self.NO_DIP_SWEEP}})

        summary = runner.run("dip")

        self.writer.finish.assert_called_once_with()
        assert summary["warnings"] == ["No dip between 63.0 and 64.5 deg"]

    def test_dip_writes_table_then_sidecar(self):
        runner = self.runner({"optics": {"sweep": self.NO_DIP_SWEEP}})

        runner.dip()

        stem, fields, rows = self.writer.write_table.call_args.args
        assert (stem, fields) == ("dip", DIP_FIELDS)
        assert len(rows) == 31
        name, payload = self.writer.write_json.call_args.args
        assert name == "dip.json"
        assert payload["warning"] == "no dip in sweep"

    def test_missing_block_is_rejected_before_any_output(self):
        runner = self.runner({})

        with pytest.raises(ValueError, match="source"):
            runner.run("budget")

        self.writer.write_table.assert_not_called()
        self.writer.finish.assert_not_called()

    @patch("experiments.services.experiment_runner.fit_gain", return_value=2.0)
    def test_squeezing_source_is_calibrated_behind_the_window(self, mock_fit_gain):
        runner = self.runner({"source": {"squeezing_db": 7.8, "squeezing_upstream_transmission": 0.92}})

        source = runner.build_source()

        mock_fit_gain.assert_called_once_with(7.8, 0.92)
        assert source.gain == 2.0

    @patch("experiments.services.experiment_runner.fit_gain")
    def test_gain_source_skips_calibration(self, mock_fit_gain):
        runner = self.runner({"source": {"gain": 3.0}})

        assert runner.build_source().gain == 3.0
        mock_fit_gain.assert_not_called()

    def test_lock_without_resonance_raises(self):
        runner = self.runner({"optics": {"sweep": self.NO_DIP_SWEEP}, "kinetics": self.KINETICS})

        with pytest.raises(NoResonanceError):
            runner.lock(runner.buffer_stack())

    def test_configured_locked_angle_needs_no_resonance(self):
        kinetics = {**self.KINETICS, "locked_angle_deg": 64.0}
        runner = self.runner({"optics": {"sweep": self.NO_DIP_SWEEP}, "kinetics": kinetics})

        dip = runner.lock(runner.buffer_stack())

        assert runner.locked_angle(dip) == 64.0

    @patch("experiments.services.experiment_runner.fit_kinetics")
    @patch("experiments.services.experiment_runner.synthetic_sensorgram")
    def test_fit_arms_draw_independent_noise(self, mock_synthetic, mock_fit_kinetics):
        mock_fit_kinetics.return_value = Mock(converged=True, **{"to_dict.return_value": {}, "stderr.return_value": 1.0})
        sweep = {**self.NO_DIP_SWEEP, "theta_min_deg": 63.0, "theta_max_deg": 70.0}
        fit = {"noise_sigma": 1e-3, "initial_guess": {"ka": 1.5e4, "kd": 3.5e-3, "delta_n_max": 0.004}}
        runner = self.runner({"rng_seed": 5, "optics": {"sweep": sweep}, "kinetics": self.KINETICS, "fit": fit})

        runner.fit()

        (coherent_call, squeezed_call) = mock_synthetic.call_args_list
        coherent_stream, squeezed_stream = coherent_call.args[-1], squeezed_call.args[-1]
        assert coherent_call.args[-2] == pytest.approx(1e-3)
        assert squeezed_call.args[-2] == pytest.approx(1e-3 * 10 ** (-4.0 / 20))
        assert coherent_stream.entropy == squeezed_stream.entropy == 5
        assert coherent_stream.spawn_key != squeezed_stream.spawn_key
