import json

import pytest
from django.conf import settings
from pydantic import ValidationError

from experiments.schemas import COMMAND_BLOCKS, LossConfig, OpticsConfig, RunConfig, SourceConfig
from optics.services import GOLD_PERMITTIVITY_795NM
from quantum.services import CONJUGATE, PROBE


REPORTED_SETUP = settings.BASE_DIR / "experiments" / "data" / "configs" / "reported_setup.json"


class TestRunConfig:
    def test_defaults_describe_the_water_sensor(self):
        config = RunConfig()

        assert config.rng_seed == 0
        assert config.optics.analyte_index == 1.33
        assert config.optics.metal_permittivity() == GOLD_PERMITTIVITY_795NM
        assert config.source is None

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"optics": {"analyte_idx": 1.34}})

    def test_rejects_unknown_top_level_keys(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"plotting": True})

    def test_bundled_config_is_valid(self):
        config = RunConfig.model_validate(json.loads(REPORTED_SETUP.read_text()))

        for command in COMMAND_BLOCKS:
            config.require_blocks(command)

    def test_missing_block_for_command(self):
        with pytest.raises(ValueError, match="source"):
            RunConfig().require_blocks("budget")

    def test_hash_is_stable_under_key_reordering(self):
        forward = {"rng_seed": 3, "source": {"gain": 2.0, "seed_flux": 1e6}}
        backward = {"source": {"seed_flux": 1e6, "gain": 2.0}, "rng_seed": 3}

        assert RunConfig.model_validate(forward).config_hash() == RunConfig.model_validate(backward).config_hash()

    def test_hash_changes_with_values(self):
        first = RunConfig.model_validate({"rng_seed": 3})
        second = RunConfig.model_validate({"rng_seed": 4})

        assert first.config_hash() != second.config_hash()

    def test_round_trip_keeps_the_hash(self):
        config = RunConfig.model_validate(json.loads(REPORTED_SETUP.read_text()))

        restored = RunConfig.model_validate_json(config.canonical_json())

        assert restored.config_hash() == config.config_hash()


class TestOpticsConfig:
    def test_explicit_permittivity(self):
        optics = OpticsConfig.model_validate({"gold_permittivity": {"real": -20.0, "imag": 1.2}})

        assert optics.build_stack().films[0].medium.permittivity == complex(-20.0, 1.2)

    def test_drude_permittivity_is_absorbing_metal(self):
        eps = OpticsConfig.model_validate({"drude": {}}).metal_permittivity()

        assert eps.real < 0 < eps.imag

    def test_rejects_both_metal_sources(self):
        with pytest.raises(ValidationError):
            OpticsConfig.model_validate({"gold_permittivity": {"real": -20.0, "imag": 1.2}, "drude": {}})

    def test_rejects_gain_medium(self):
        with pytest.raises(ValidationError):
            OpticsConfig.model_validate({"gold_permittivity": {"real": -20.0, "imag": -1.0}})

    def test_rejects_inverted_sweep(self):
        with pytest.raises(ValidationError):
            OpticsConfig.model_validate({"sweep": {"theta_min_deg": 70.0, "theta_max_deg": 63.0}})


class TestSourceConfig:
    def test_needs_exactly_one_of_gain_or_squeezing(self):
        with pytest.raises(ValidationError):
            SourceConfig.model_validate({})
        with pytest.raises(ValidationError):
            SourceConfig.model_validate({"gain": 2.0, "squeezing_db": 3.0})

    def test_rejects_gain_below_one(self):
        with pytest.raises(ValidationError):
            SourceConfig.model_validate({"gain": 0.5})


class TestLossConfig:
    def test_stages_follow_their_beam(self):
        loss = LossConfig.model_validate({
            "stages": [
                {"label": "cell_window", "transmission": 0.92},
                {"label": "probe_mirror", "transmission": 0.9, "beam": "probe"},
                {"label": "conjugate_filter", "transmission": 0.8, "beam": "conjugate"},
            ]
        })

        chain = loss.build_chain()

        assert [s.label for s in chain.stages(PROBE)] == ["cell_window", "probe_mirror"]
        assert [s.label for s in chain.stages(CONJUGATE)] == ["cell_window", "conjugate_filter"]

    def test_default_point_is_the_whole_chain(self):
        loss = LossConfig.model_validate({"stages": [{"label": "cell_window", "transmission": 0.92}]})

        (point,) = loss.build_points()

        assert (point.label, point.probe_stage_count, point.conjugate_stage_count) == ("total", 1, 1)

    def test_point_conjugate_count_defaults_to_probe_count(self):
        loss = LossConfig.model_validate({"points": [{"label": "A", "probe_stages": 2}]})

        assert loss.build_points()[0].conjugate_stage_count == 2

    def test_rejects_transmission_above_one(self):
        with pytest.raises(ValidationError):
            LossConfig.model_validate({"stages": [{"label": "x", "transmission": 1.2}]})


class TestAcquisitionConfig:
    def test_rejects_non_power_of_two_segment(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"acquisition": {"segment_length": 3000}})

    def test_rejects_tone_above_nyquist(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"acquisition": {"sample_rate_hz": 3e6, "tone_frequency_hz": 2e6}})

    def test_builds_detection_specs(self):
        config = RunConfig.model_validate({"acquisition": {"segments_per_point": 4}})

        acquisition = config.acquisition.build_acquisition(rng_seed=9)

        assert acquisition.segments_per_point == 4
        assert acquisition.rng_seed == 9
        assert config.acquisition.build_band().exclusion_halfwidth_bins == 3
