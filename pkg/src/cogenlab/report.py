from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class CheckReport:
    """Outcome of a criterion check.

    ``margin`` is the relative slack ``1 - observed / bound`` at the worst grid
    point, so a negative margin is a violation. ``certified`` is False when a PASS rests on
    an optimizer lower bound rather than an exact norm.
    """

    passed: bool
    worst_param: Any = None
    margin: float = math.nan
    certificate: Any = None
    certified: bool = True
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "worst_param": jsonable(self.worst_param),
            "margin": jsonable(self.margin),
            "certificate": jsonable(self.certificate),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def jsonable(obj):
    """Convert numpy / complex values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0:
            return jsonable(z.real)
        return {"re": jsonable(z.real), "im": jsonable(z.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x
    return obj
