"""Small numeric helpers: rational parsing, formatting, grids, bisection."""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

from .errors import SpecFormatError

RATIONAL = "rational"
FLOAT = "float"

DEFAULT_FLOAT_TOL = 1e-12


def frac(value) -> Fraction:
    """Parse a rational from an int, Fraction or string like ``"3/4"``.

    Decimal strings ("0.25") are accepted and converted exactly.  Binary
    floats are rejected: a float almost never means the literal binary
    value, and silently exactifying it would poison rational models.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SpecFormatError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecFormatError(f"cannot parse rational {value!r}") from exc
    raise SpecFormatError(f"not a rational value: {value!r}")


def as_number(value, arithmetic: str):
    """Coerce a parsed JSON value into the model's arithmetic."""
    if arithmetic == RATIONAL:
        return frac(value)
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def fmt_number(value):
    """JSON-friendly rendering: Fractions as ``"p/q"``, floats as floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return value
    return float(value)


def sig15(value) -> str:
    """Decimalize at 15 significant digits (CSV output contract)."""
    return "%.15g" % float(value)


def locate_cell(points, x) -> int:
    """Index i with points[i] <= x <= points[i+1]; shared by p and u_eps.

    The left cell wins at shared interior points only through the clamp at
    the final point; interior knots resolve to the right cell, which both
    evaluators use identically.
    """
    i = bisect_right(points, x) - 1
    if i >= len(points) - 1:
        i = len(points) - 2
    return max(i, 0)


def bisect_solve(fn, target, lo, hi, tol: float = 1e-12, max_iter: int = 200):
    """Certified-bracket bisection for fn(x) = target on [lo, hi].

    fn must be monotone on the bracket.  Returns a float root; exact hits
    at the bracket endpoints are returned unchanged.
    """
    flo = fn(lo) - target
    fhi = fn(hi) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(
            f"no sign change on bracket [{lo}, {hi}] for target {target}"
        )
    a, b = float(lo), float(hi)
    fa = float(flo)
    eps = tol * max(1.0, abs(a), abs(b))
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if b - a <= eps or mid == a or mid == b:
            return mid
        fm = fn(mid) - target
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def uniform_grid(a, b, n: int, exact: bool):
    """n evenly spaced points from a to b inclusive, in the given arithmetic."""
    if n < 2:
        raise ValueError("grid needs at least two points")
    if exact:
        a, b = frac_like(a), frac_like(b)
        step = (b - a) / (n - 1)
        return [a + i * step for i in range(n)]
    a, b = float(a), float(b)
    step = (b - a) / (n - 1)
    pts = [a + i * step for i in range(n)]
    pts[-1] = b
    return pts


def frac_like(value) -> Fraction:
    """Exact conversion for internally produced values (floats allowed)."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)
