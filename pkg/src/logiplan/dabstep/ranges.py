"""Range specifications used by fee rules: '100k-1m', '>5', '<3', '7.7%-8.3%', 'immediate'."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DataError

UNITS = ("days", "euros", "percent")
TAGS = ("immediate", "manual")

_SUFFIX = {"k": 1_000, "m": 1_000_000}
_NUM = r"(\d+(?:\.\d+)?)\s*([kKmM]?)\s*(%?)"
_INTERVAL = re.compile(rf"^{_NUM}\s*-\s*{_NUM}$")
_BOUND = re.compile(rf"^([<>])\s*{_NUM}$")
_EXACT = re.compile(rf"^{_NUM}$")


@dataclass(frozen=True)
class RangeSpec:
    kind: str  # interval | lower_exclusive | upper_exclusive | exact | tag
    low: float | None = None
    high: float | None = None
    tag: str | None = None
    unit: str = "days"
    text: str = ""

    def contains(self, value: float) -> bool:
        """Numeric containment; tag specs never contain a number."""
        if self.kind == "interval":
            return self.low <= value <= self.high
        if self.kind == "lower_exclusive":
            return value > self.low
        if self.kind == "upper_exclusive":
            return value < self.high
        if self.kind == "exact":
            return value == self.low
        return False


def _number(digits: str, suffix: str, percent: str, unit: str, text: str) -> float:
    if percent and unit != "percent":
        raise DataError(f"range {text!r}: '%' is only valid for percent ranges")
    if suffix and unit == "percent":
        raise DataError(f"range {text!r}: k/m suffixes are not valid for percent ranges")
    value = float(digits) * _SUFFIX.get(suffix.lower(), 1) if suffix else float(digits)
    return int(value) if value.is_integer() and "." not in digits else value


def parse_range_spec(text: str, unit: str = "days") -> RangeSpec:
    if unit not in UNITS:
        raise ValueError(f"unknown unit {unit!r}")
    if not isinstance(text, str) or not text.strip():
        raise DataError("empty range specification")
    s = text.strip()
    if s.lower() in TAGS:
        if unit != "days":
            raise DataError(f"range {text!r}: tags only apply to capture delays")
        return RangeSpec("tag", tag=s.lower(), unit=unit, text=text)
    m = _INTERVAL.match(s)
    if m:
        low = _number(*m.group(1, 2, 3), unit, text)
        high = _number(*m.group(4, 5, 6), unit, text)
        if low > high:
            raise DataError(f"range {text!r}: lower bound exceeds upper bound")
        return RangeSpec("interval", low, high, unit=unit, text=text)
    m = _BOUND.match(s)
    if m:
        bound = _number(*m.group(2, 3, 4), unit, text)
        if m.group(1) == ">":
            return RangeSpec("lower_exclusive", low=bound, unit=unit, text=text)
        return RangeSpec("upper_exclusive", high=bound, unit=unit, text=text)
    m = _EXACT.match(s)
    if m:
        v = _number(*m.group(1, 2, 3), unit, text)
        return RangeSpec("exact", v, v, unit=unit, text=text)
    raise DataError(f"cannot parse range specification {text!r}")
