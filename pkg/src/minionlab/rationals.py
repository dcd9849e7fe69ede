"""Exact rational arithmetic used throughout the solvers.

gmpy2's mpq is the workhorse (roughly 7x faster than fractions.Fraction on
the pivot-heavy simplex paths); Fraction is the fallback so the package still
imports without the C extension.  All rational values must be created through
:func:`rat` so the two types never mix inside one computation.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _mpq

    def rat(p=0, q=1):
        return _mpq(p, q)

    RATIONAL_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _mpq

    def rat(p=0, q=1):
        return _mpq(p, q)

    RATIONAL_BACKEND = "fractions"

R0 = rat(0)
R1 = rat(1)


def rat_from_str(s: str):
    """Parse ``"p/q"`` or ``"p"`` into an exact rational."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        return rat(int(p), int(q))
    return rat(int(s))


def rat_to_str(x) -> str:
    """Render an exact rational as ``"p/q"`` (or ``"p"`` when integral)."""
    n, d = x.numerator, x.denominator
    return f"{n}/{d}" if d != 1 else str(n)


def is_integral(x) -> bool:
    return x.denominator == 1


def as_int(x) -> int:
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer")
    return int(x.numerator)
