"""Extended reals: floats (including infinities) plus an explicit undefined marker.

Comparing :data:`UNDEFINED` with a number raises ``TypeError``, so callers
must branch on it deliberately.
"""
from __future__ import annotations

from typing import Union


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __str__(self) -> str:
        return "undefined"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

ExtendedReal = Union[float, _Undefined]


def is_defined(x: ExtendedReal) -> bool:
    return x is not UNDEFINED


def exceeds(x: ExtendedReal, threshold: float) -> bool:
    """``x > threshold``, with ``UNDEFINED`` never exceeding anything."""
    return x is not UNDEFINED and x > threshold
