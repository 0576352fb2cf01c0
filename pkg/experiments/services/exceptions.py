class ExperimentError(Exception):
    """Base exception for experiment runs."""


class ConfigError(ExperimentError, ValueError):
    """The run configuration is missing, unreadable, or fails schema validation."""
