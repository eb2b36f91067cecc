"""Canonical JSON: sorted keys, sorted simplex lists, no whitespace variance."""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any


def jsonable(obj: Any) -> Any:
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    to_json = getattr(obj, "to_json", None)
    if to_json is not None:
        return jsonable(to_json())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def write(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj) + "\n")
