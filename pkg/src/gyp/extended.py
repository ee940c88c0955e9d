"""Extended-real helpers.

Values are plain Python floats; ``math.inf`` and ``-math.inf`` stand for the
infinite points. The helpers below apply the usual information-theory
conventions: ``ln 0 = -inf``, ``ln(a/0) = +inf`` for ``a > 0`` and
``0 * (+-inf) = 0``.
"""

from __future__ import annotations

import math

INF = math.inf


def ext_log(x: float) -> float:
    if x < 0:
        raise ValueError(f"log of negative number {x!r}")
    if x == 0:
        return -INF
    return math.log(x)


def ext_mul(a: float, b: float) -> float:
    """Product with ``0 * (+-inf) = 0``."""
    if a == 0 or b == 0:
        return 0.0
    return a * b


def log_ratio(a: float, b: float) -> float:
    """``ln(a / b)`` with ``ln(a/0) = +inf`` for ``a > 0`` and ``ln(0/b) = -inf``."""
    if a == 0:
        return -INF
    if b == 0:
        return INF
    return math.log(a / b)


def xlogx_ratio(a: float, b: float) -> float:
    """``a * ln(a / b)``; zero when ``a == 0`` whatever ``b`` is."""
    return ext_mul(a, log_ratio(a, b))


def is_finite(x: float) -> bool:
    return math.isfinite(x)


def format_ext(x: float) -> str:
    """17 significant digits; infinities as ``inf`` / ``-inf``."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if math.isnan(x):
        return "nan"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def parse_ext(s: str | float | int) -> float:
    if isinstance(s, (int, float)):
        return float(s)
    s = s.strip().lower()
    if s in ("inf", "+inf", "infinity"):
        return INF
    if s in ("-inf", "-infinity"):
        return -INF
    return float(s)
