from .config_loader import load_config_json
from .schema_validator import validate_with_schema

__all__ = [
    "load_config_json",
    "validate_with_schema",
]
