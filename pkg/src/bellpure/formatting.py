"""Number formatting shared by the JSON, CSV and table writers."""
from __future__ import annotations

import math

from .extended import UNDEFINED

CSV_DIGITS = 15
TABLE_DIGITS = 6


def _special(x) -> str | None:
    if x is UNDEFINED:
        return "undefined"
    if isinstance(x, float) and not math.isfinite(x):
        if math.isnan(x):
            return "nan"
        return "inf" if x > 0 else "-inf"
    return None


def fmt_num(x, digits: int = CSV_DIGITS) -> str:
    """Format a number (or extended real, bool, None) for CSV or tables."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    special = _special(x)
    if special is not None:
        return special
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) or hasattr(x, "__float__"):
        return format(float(x), f".{digits}g")
    return str(x)


def ext_json(x):
    """JSON-ready value: finite floats rounded to 15 significant digits, specials as strings."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    special = _special(x)
    if special is not None:
        return special
    return float(format(float(x), f".{CSV_DIGITS}g"))


def parse_ext(value):
    """Inverse of :func:`ext_json` for extended reals."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key == "undefined":
            return UNDEFINED
        if key in ("inf", "+inf", "-inf", "nan"):
            return float(key)
        return float(key)
    return float(value)
