"""Exact decimal formatting of rationals.

Output is always truncated toward zero, never rounded, so a printed prefix
never overstates the accuracy of the value behind it.  Callers that display
error bounds use the ceiling variant so the printed bound stays an upper
bound.
"""

from __future__ import annotations

from fractions import Fraction


def decimal_string(value: Fraction, digits: int) -> tuple[str, bool]:
    """Truncate `value` to `digits` fractional digits.

    Returns (text, exact); `exact` is True when no digits were discarded.
    """
    if digits < 0:
        raise ValueError("digits must be >= 0")
    sign = "-" if value < 0 else ""
    scaled = abs(value) * 10**digits
    whole = scaled.numerator // scaled.denominator
    exact = whole * scaled.denominator == scaled.numerator
    if digits == 0:
        return sign + str(whole), exact
    text = str(whole).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}", exact


def decimal_string_ceil(value: Fraction, digits: int) -> str:
    """Decimal text guaranteed >= `value` (for nonnegative inputs)."""
    if value < 0:
        raise ValueError("ceiling formatting expects a nonnegative value")
    scaled = value * 10**digits
    whole = -((-scaled.numerator) // scaled.denominator)  # ceil
    if digits == 0:
        return str(whole)
    text = str(whole).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}"
