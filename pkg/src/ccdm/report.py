"""Number formatting shared by the CSV/JSON writers."""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal

PRECISIONS = ("report", "full")
_THREE = Decimal("0.001")


def round3(x: float) -> str:
    """Round half-to-even on the shortest decimal form of ``x``, 3 places."""
    q = Decimal(repr(float(x))).quantize(_THREE, rounding=ROUND_HALF_EVEN)
    if q == 0:
        q = abs(q)
    return f"{q:.3f}"


def fmt(x: float, precision: str = "report") -> str:
    if precision == "report":
        return round3(x)
    if precision == "full":
        return repr(float(x))
    raise ValueError(f"unknown precision mode {precision!r}; expected one of {PRECISIONS}")
