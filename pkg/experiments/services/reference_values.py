import json
from functools import lru_cache
from typing import Any, Dict, Optional

from django.conf import settings


@lru_cache(maxsize=1)
def load_reference_values() -> Dict[str, Any]:
    """Reported measurements shown next to model output, never asserted against."""
    with open(settings.REFERENCE_VALUES_PATH, encoding="utf-8") as handle:
        return json.load(handle)


def reported_point_squeezing(label: str) -> Optional[float]:
    point = load_reference_values()["loss_points"].get(label)
    return None if point is None else point["squeezing_db"]
