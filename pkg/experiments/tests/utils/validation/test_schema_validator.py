import pytest

from experiments.schemas import RunConfig, SourceConfig
from experiments.services.exceptions import ConfigError
from experiments.utils.validation import validate_with_schema


class TestValidateWithSchema:
    def test_returns_model(self):
        config = validate_with_schema({"rng_seed": 12}, RunConfig)

        assert isinstance(config, RunConfig)
        assert config.rng_seed == 12

    def test_wraps_validation_errors(self):
        with pytest.raises(ConfigError, match="Config validation failed"):
            validate_with_schema({"gain": 0.2}, SourceConfig)

    def test_config_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            validate_with_schema({"unknown": 1}, RunConfig)
