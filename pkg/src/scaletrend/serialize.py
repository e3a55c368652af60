"""Canonical JSON: sorted keys, fixed float formatting (17 significant
digits), no whitespace variation. Output is byte-stable so reports can be
compared for equality across runs and worker counts.
"""

from __future__ import annotations

import json
import math


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x} not allowed in canonical JSON")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def canonical_dumps(obj) -> str:
    """Serialize to canonical JSON. Dict keys must be strings."""
    return _dump(obj)


def _dump(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        body = ",".join(f"{json.dumps(k)}:{_dump(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot canonically serialize {type(obj).__name__}")
