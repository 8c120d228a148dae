"""Image measures, open covers with slack budgets, and Lusin probes.

Everything here is exact for finite-segmentation models: the image of an
interval set is assembled monotone segment by monotone segment, so its
measure carries no quadrature error.  Null sets are represented by
shrinking families (measure -> 0), and Lusin verdicts are one-sided by
construction: failure is conclusive, passage holds "at resolution".
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from ._num import frac
from .errors import PreconditionError, SpecFormatError
from .intervals import Interval, IntervalSet
from .model import CONSTANT, INCREASING, FunctionModel


def measure(E: IntervalSet):
    """Total length of the interval set (the Lebesgue measure)."""
    return E.measure


def image_set(model: FunctionModel, E: IntervalSet) -> IntervalSet:
    """F(E) as an interval set, exact per monotone segment.

    Each component of E is clipped to the monotone segments it meets; a
    monotone segment maps a clipped component to one interval whose
    endpoint flags mirror the component's (strict monotonicity inside a
    non-constant segment keeps openness), and constant segments map to
    single points.
    """
    if not model.continuity_flag:
        raise PreconditionError("image computation requires a continuous model")
    segments = model.monotone_segments().segments
    seg_starts = [s.lo for s in segments]
    pieces = []
    for comp in E.clip(model.a, model.b):
        i = max(bisect_right(seg_starts, comp.lo) - 1, 0)
        while i < len(segments):
            seg = segments[i]
            if seg.lo > comp.hi:
                break
            part = comp.intersect(Interval(seg.lo, seg.hi))
            if not part.empty:
                flo = model.evaluate(part.lo)
                fhi = model.evaluate(part.hi)
                if seg.direction == CONSTANT:
                    pieces.append(Interval(flo, flo))
                elif seg.direction == INCREASING:
                    pieces.append(Interval(flo, fhi, part.lo_open, part.hi_open))
                else:
                    pieces.append(Interval(fhi, flo, part.hi_open, part.lo_open))
            i += 1
    return IntervalSet(pieces)


def image_measure(model: FunctionModel, E: IntervalSet):
    """lambda(F(E)): the image measure of E under the model."""
    return image_set(model, E).measure


def inflate(E: IntervalSet, slack) -> IntervalSet:
    """Disjoint open cover of E with measure < measure(E) + slack.

    The slack is distributed proportionally to component lengths with a
    floor of slack/(4m) per component (m components), so point components
    still receive open neighbourhoods; at most 3/4 of the slack is ever
    spent, keeping the budget strict.
    """
    if not slack > 0:
        raise SpecFormatError("slack must be positive")
    if E.is_empty:
        return IntervalSet.empty()
    m = len(E.components)
    total = E.measure
    floor = slack / (4 * m)
    out = []
    for comp in E:
        share = slack * comp.length / total if total > 0 else 0
        amount = max(share / 2, floor)
        half = amount / 2
        out.append(Interval(comp.lo - half, comp.hi + half, True, True))
    return IntervalSet(out)


def cover_image(model: FunctionModel, E: IntervalSet, slack) -> IntervalSet:
    """Disjoint open intervals covering F(E) within the slack budget."""
    return inflate(image_set(model, E), slack)


def split_cover_at(cover: IntervalSet, values) -> IntervalSet:
    """Exclude the given points from the cover, splitting any interval that
    strictly contains one; total measure is unchanged."""
    points = IntervalSet(Interval(v, v) for v in values)
    return cover.difference(points)


# ---------------------------------------------------------------------------
# shrinking null-set families
# ---------------------------------------------------------------------------


def _cantor_level(j: int) -> list:
    comps = [(Fraction(0), Fraction(1))]
    for _ in range(j):
        nxt = []
        for lo, hi in comps:
            w = (hi - lo) / 3
            nxt.append((lo, lo + w))
            nxt.append((hi - w, hi))
        comps = nxt
    return comps


@dataclass(frozen=True)
class NullSetFamily:
    """Finite stand-in for a null set: levels with measure strictly -> 0.

    kinds:
      * ``cantor_levels``: the 2^j middle-third intervals of length 3^-j,
        scaled affinely into the domain;
      * ``shrinking_uniform``: ``count`` equal slots, each holding a closed
        interval shrinking geometrically at ``rate`` (count=1 anchors the
        single interval at the left endpoint);
      * ``custom``: an explicit tuple of interval sets.
    """

    kind: str
    domain: tuple
    count: int = 1
    rate: Fraction = Fraction(1, 2)
    levels: tuple = ()

    def __post_init__(self):
        if self.kind not in ("cantor_levels", "shrinking_uniform", "custom"):
            raise SpecFormatError(f"unknown family kind {self.kind!r}")
        if self.kind == "shrinking_uniform":
            r = frac(self.rate)
            if not 0 < r < 1:
                raise SpecFormatError("rate must lie in (0, 1)")
            if self.count < 1:
                raise SpecFormatError("count must be >= 1")

    def component_count(self, j: int) -> int:
        """Number of intervals at level j, without building them."""
        if self.kind == "cantor_levels":
            return 2 ** j
        if self.kind == "shrinking_uniform":
            return self.count
        return len(self.levels[j - 1]) if j <= len(self.levels) else 0

    def level(self, j: int) -> IntervalSet:
        if j < 1:
            raise SpecFormatError("family levels start at 1")
        a, b = self.domain
        if not (isinstance(a, float) or isinstance(b, float)):
            a, b = frac(a), frac(b)  # keep exact domains exact
        if self.kind == "cantor_levels":
            span = b - a
            return IntervalSet(
                Interval(a + lo * span, a + hi * span) for lo, hi in _cantor_level(j)
            )
        if self.kind == "shrinking_uniform":
            w = (b - a) / self.count
            ratio = frac(self.rate) ** j
            if isinstance(w, float):
                ratio = float(ratio)
            return IntervalSet(
                Interval(a + i * w, a + i * w + ratio * w) for i in range(self.count)
            )
        if j > len(self.levels):
            raise SpecFormatError(f"custom family has only {len(self.levels)} levels")
        return self.levels[j - 1]


def cantor_family(domain=(0, 1)) -> NullSetFamily:
    return NullSetFamily("cantor_levels", tuple(domain))


def shrinking_family(domain=(0, 1), count=1, rate=Fraction(1, 2)) -> NullSetFamily:
    return NullSetFamily("shrinking_uniform", tuple(domain), count=count, rate=rate)


# ---------------------------------------------------------------------------
# Lusin probe
# ---------------------------------------------------------------------------


PASSES = "passes_at_resolution"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LusinReport:
    """Tabulated (level, set measure, image measure) rows with a verdict.

    ``fails`` means every computed image measure stayed at or above the
    threshold while the set measures shrank: conclusive evidence against
    the null-to-null property at this resolution.  ``passes_at_resolution``
    requires the image measures to visibly decay; anything else is
    inconclusive (a legitimate outcome, not an error).
    """

    levels: tuple
    verdict: str
    threshold: object

    @property
    def passed(self) -> bool:
        return self.verdict == PASSES


def lusin_probe(model: FunctionModel, family: NullSetFamily, max_level: int,
                threshold=Fraction(1, 2)) -> LusinReport:
    if max_level < 1:
        raise SpecFormatError("max_level must be >= 1")
    rows = []
    prev = None
    for j in range(1, max_level + 1):
        nj = family.level(j)
        mu = nj.measure
        if prev is not None and not mu < prev:
            raise PreconditionError(
                f"family measures must decrease strictly (level {j}: {mu} vs {prev})")
        prev = mu
        rows.append((j, mu, image_measure(model, nj)))
    images = [row[2] for row in rows]
    if all(img >= threshold for img in images):
        verdict = FAILS
    elif images[-1] == 0 or (images[-1] < threshold
                             and 2 * images[-1] <= images[0]):
        verdict = PASSES
    else:
        verdict = INCONCLUSIVE
    return LusinReport(tuple(rows), verdict, threshold)
