"""JSON encoding of reports: matrices as [re, im] literals, exact float round-trip."""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from typing import Any

import numpy as np

from . import controls as ctl
from . import matrix as mx


def control_to_json(c: ctl.Control) -> dict:
    if isinstance(c, ctl.Constant):
        return {"variant": "constant", "c": c.c}
    if isinstance(c, ctl.Power):
        return {"variant": "power", "alpha": c.alpha, "p": c.p}
    return {"variant": "sum", "parts": [control_to_json(p) for p in c.parts]}


def to_jsonable(obj: Any) -> Any:
    """Recursively convert report objects. Non-finite floats become ``None``."""
    if isinstance(obj, (ctl.Constant, ctl.Power, ctl.Sum)):
        return control_to_json(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if not f.name.startswith("_")}
    if isinstance(obj, np.ndarray):
        return mx.to_literal(obj) if obj.ndim == 2 else [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    # repr-based floats are the shortest strings that round-trip binary64 exactly
    return json.dumps(to_jsonable(obj), indent=indent, sort_keys=True, allow_nan=False, ensure_ascii=False)
