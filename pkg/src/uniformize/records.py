"""Check records shared by every verifier."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"
INFO = "INFO"


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass
class CheckRecord:
    """Outcome of one empirical check.

    ``values`` holds measured constants and bounds, ``witness`` the nodes
    realising the extreme value, ``flags`` free-form caveats such as
    ``"vacuous"``.
    """

    name: str
    status: str
    values: dict = field(default_factory=dict)
    witness: Any = None
    flags: list[str] = field(default_factory=list)
    #: per-pair rows for CSV export; not part of the JSON record
    rows: list[dict] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.status in (PASS, INFO, SKIPPED)

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "values": _plain(self.values),
            "witness": _plain(self.witness),
            "flags": list(self.flags),
        }


def status_of(ok: bool) -> str:
    return PASS if ok else FAIL


def relative_spread(values) -> float:
    """``(max - min) / min`` of positive values; the stability measure for radius sweeps."""
    vals = [float(v) for v in values]
    lo, hi = min(vals), max(vals)
    if lo <= 0:
        return math.inf
    return (hi - lo) / lo
