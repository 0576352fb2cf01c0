import json
from pathlib import Path
from typing import Any, Dict, Union

from experiments.services.exceptions import ConfigError


def load_config_json(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a run configuration file into a dictionary.

    Args:
        path: Path to a JSON document whose top level is an object.

    Returns:
        Parsed JSON object.

    Raises:
        ConfigError: If the file is missing, is not valid JSON, or its top
            level is not an object.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object, not {type(data).__name__}")
    return data
