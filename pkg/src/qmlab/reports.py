"""Check reports and value rendering shared by the library and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Any

import numpy as np

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


def render_value(value: Any) -> Any:
    """JSON-friendly rendering: exact rationals as ``p/q``, floats with 12 significant digits."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Real):
        v = float(value)
        if v == 0.0:
            v = 0.0
        return format(v, ".12g")
    if isinstance(value, dict):
        return {str(k): render_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render_value(v) for v in value]
    return value


@dataclass
class Report:
    """Outcome of one executable check.

    ``claim`` states the property under test in words.  A failing report
    always carries either a witness or the values that disagree.
    """

    check: str
    claim: str
    status: str
    values: dict = field(default_factory=dict)
    witness: dict | None = None

    def __post_init__(self):
        if self.status not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAIL and not (self.witness or self.values):
            raise ValueError("a failing report needs a witness or values")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "claim": self.claim,
            "status": self.status,
            "values": render_value(self.values),
        }
        if self.witness is not None:
            out["witness"] = render_value(self.witness)
        return out


def status_of(ok: bool) -> str:
    return PASS if ok else FAIL
