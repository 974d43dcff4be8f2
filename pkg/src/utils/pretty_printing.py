"""Pretty-Print Utils."""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pydantic


def _serializer(item: Any) -> Any:
    """Serialize using heuristics."""
    if isinstance(item, pydantic.BaseModel):
        return item.model_dump(mode="json")

    if isinstance(item, np.ndarray):
        if item.size <= 16:
            return item.tolist()
        return {
            "shape": list(item.shape),
            "min": float(item.min()),
            "max": float(item.max()),
        }

    if isinstance(item, np.generic):
        return item.item()

    if isinstance(item, Path):
        return item.as_posix()

    return str(item)


def pretty_print(data: Any) -> str:
    """Print nested items with indentations."""
    output = json.dumps(data, indent=2, default=_serializer)
    print(output)
    return output
