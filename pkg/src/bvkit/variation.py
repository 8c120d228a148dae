"""Variation machinery: V_a^x(F), the variation function p, the Jordan
decomposition F = p - n, and the cellwise uniform approximant of p.

For models with a finite monotone segmentation the variation is exact: the
segment knots achieve the supremum over partitions, so lower and upper
bracket coincide.  Oscillating models fall back to dyadic refinement with
a declared stagnation tolerance and a hard cap.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from ._num import locate_cell
from .errors import (
    InfiniteSegmentationError,
    NotBVError,
    PreconditionError,
    SpecFormatError,
    UnresolvedOscillationError,
)
from .model import (
    CONSTANT,
    DECREASING,
    INCREASING,
    FunctionModel,
    make_transformed,
    _sorted_unique,
)

DEFAULT_TOL = 1e-9
REFINEMENT_CAP = 1 << 20


def validate_partition(model: FunctionModel, points) -> tuple:
    pts = tuple(points)
    if len(pts) < 2:
        raise SpecFormatError("a partition needs at least two points")
    for x0, x1 in zip(pts, pts[1:]):
        if not x0 < x1:
            raise SpecFormatError("partition points must increase strictly")
    if pts[0] < model.a or pts[-1] > model.b:
        raise SpecFormatError("partition outside the model domain")
    return pts


def partition_sum(model: FunctionModel, points):
    """Sum of |F(x_k) - F(x_{k-1})| over the partition; exact in rational mode."""
    pts = validate_partition(model, points)
    values = [model.evaluate(x) for x in pts]
    total = 0
    for v0, v1 in zip(values, values[1:]):
        total += abs(v1 - v0)
    return total


@dataclass(frozen=True)
class VariationEstimate:
    """Certified bracket for V_a^x(F) with the partition achieving ``lower``."""

    lower: object
    upper: object
    achieving_partition: tuple
    converged: bool
    refinement_trace: tuple


def total_variation(model: FunctionModel, x=None, tol=DEFAULT_TOL,
                    max_points: int = REFINEMENT_CAP) -> VariationEstimate:
    """Variation of the model from a to x (default b).

    Finite segmentation: exact, with the achieving partition being the
    segment knots clipped to [a, x].  Otherwise: dyadic refinement until a
    full round gains at most ``tol``; past ``max_points`` an
    :class:`UnresolvedOscillationError` carries the partial lower bound.
    """
    if x is None:
        x = model.b
    if x < model.a or x > model.b:
        raise SpecFormatError(f"{x} outside [{model.a}, {model.b}]")
    if x == model.a:
        zero = Fraction(0) if model.exact else 0.0
        return VariationEstimate(zero, zero, (model.a,), True, ((1, zero),))
    try:
        segmentation = model.monotone_segments()
    except InfiniteSegmentationError as err:
        return _refine_variation(model, x, tol, err, max_points)
    knots = [model.a]
    for seg in segmentation:
        if seg.hi < x:
            knots.append(seg.hi)
    knots.append(x)
    pts = tuple(_sorted_unique(knots))
    value = partition_sum(model, pts) if len(pts) >= 2 else (
        Fraction(0) if model.exact else 0.0)
    return VariationEstimate(value, value, pts, True, ((len(pts), value),))


_MIN_REFINE_ROUNDS = 5


def _refine_variation(model, x, tol, cause, max_points) -> VariationEstimate:
    points = [model.a, x]
    value = partition_sum(model, points)
    trace = [(len(points), value)]
    stagnant = 0
    rounds = 0
    while True:
        refined = []
        for p0, p1 in zip(points, points[1:]):
            refined.append(p0)
            refined.append(p0 + (p1 - p0) / 2)
        refined.append(points[-1])
        points = refined
        rounds += 1
        new_value = partition_sum(model, points)
        trace.append((len(points), new_value))
        gain = new_value - value
        value = new_value
        # one flat round proves nothing (the first bisection of an
        # oscillation can gain exactly zero); demand confirmed stagnation
        stagnant = stagnant + 1 if gain <= tol else 0
        if stagnant >= 2 and rounds >= _MIN_REFINE_ROUNDS:
            return VariationEstimate(value, value + tol, tuple(points), True,
                                     tuple(trace))
        if len(points) > max_points:
            estimate = VariationEstimate(value, None, tuple(points), False,
                                         tuple(trace))
            raise UnresolvedOscillationError(
                f"variation refinement passed {max_points} points without "
                f"stagnating (last round gained {gain}); {cause}",
                lower_bound=value,
                estimate=estimate,
            )


class VariationFunction:
    """p(x) = V_a^x(F), memoized at segment knots; evaluation is
    O(log #segments) and exact whenever the model is."""

    def __init__(self, model: FunctionModel, tol=DEFAULT_TOL):
        self.model = model
        self.tol = tol
        segmentation = model.monotone_segments()  # raises if infinite
        knots = segmentation.knots()
        prefix = [Fraction(0) if model.exact else 0.0]
        for lo, hi in zip(knots, knots[1:]):
            prefix.append(prefix[-1] + abs(model.evaluate(hi) - model.evaluate(lo)))
        self.knots = knots
        self.prefix = prefix
        self._directions = [seg.direction for seg in segmentation]
        self._lock = threading.Lock()
        self._model_form = None

    def __call__(self, x):
        if x < self.model.a or x > self.model.b:
            raise SpecFormatError(f"{x} outside [{self.model.a}, {self.model.b}]")
        i = locate_cell(self.knots, x)
        return self.prefix[i] + abs(self.model.evaluate(x)
                                    - self.model.evaluate(self.knots[i]))

    @property
    def total(self):
        return self.prefix[-1]

    def as_model(self) -> FunctionModel:
        """p as a first-class model (non-decreasing by construction)."""
        with self._lock:
            if self._model_form is None:
                self._model_form = _monotone_envelope_model(self, offset_scale=None)
            return self._model_form


_SIGN = {INCREASING: 1, DECREASING: -1, CONSTANT: 0}


def _monotone_envelope_model(pf: VariationFunction, offset_scale) -> FunctionModel:
    """Assemble p (offset_scale None) or n (offset_scale 'n') as a model.

    Within a segment of direction sign s, p(x) = c + s*F(x) with
    c = prefix - s*F(segment start); n = p - F replaces s by s - 1.
    """
    model = pf.model
    pieces = []
    seg_knots = pf.knots
    for idx, seg in enumerate(model.monotone_segments()):
        s = _SIGN[seg.direction]
        c = pf.prefix[idx] - s * model.evaluate(seg.lo)
        scale = s if offset_scale is None else s - 1
        for piece in model._expanded:
            lo, hi = max(piece.lo, seg.lo), min(piece.hi, seg.hi)
            if lo < hi:
                pieces.append(make_transformed(piece, scale, 0, c, lo, hi))
    suffix = "p" if offset_scale is None else "n"
    base = model.name or "F"
    return FunctionModel(pieces, arithmetic=model.arithmetic, tol=model.tol,
                         name=f"{suffix}[{base}]")


def variation_function(model: FunctionModel, tol=DEFAULT_TOL) -> VariationFunction:
    return model.cached(("variation_function", tol),
                        lambda: VariationFunction(model, tol))


@dataclass(frozen=True)
class Decomposition:
    """Jordan decomposition F = p - n with p(a) = 0 and p, n non-decreasing."""

    p: FunctionModel
    n: FunctionModel
    source: FunctionModel
    p_function: VariationFunction


def jordan_decomposition(model: FunctionModel, tol=DEFAULT_TOL,
                         verify_points: int = 256) -> Decomposition:
    """Build p = V_a^x(F) and n = p - F and verify both are non-decreasing.

    Raises :class:`NotBVError` when the variation does not resolve and
    :class:`PreconditionError` on a discontinuous model.
    """
    if not model.continuity_flag:
        raise PreconditionError("Jordan decomposition requires a continuous model")

    def build() -> Decomposition:
        try:
            pf = variation_function(model, tol)
        except (InfiniteSegmentationError, UnresolvedOscillationError) as err:
            raise NotBVError(f"model is not of resolvable bounded variation: {err}") \
                from err
        p_model = pf.as_model()
        n_model = _monotone_envelope_model(pf, offset_scale="n")
        grid = model.verification_grid(verify_points)
        grace = 0 if model.exact else 10 * model.tol
        for g0, g1 in zip(grid, grid[1:]):
            if p_model.evaluate(g1) - p_model.evaluate(g0) < -grace:
                raise NotBVError(f"p not non-decreasing between {g0} and {g1}")
            if n_model.evaluate(g1) - n_model.evaluate(g0) < -grace:
                raise NotBVError(f"n not non-decreasing between {g0} and {g1}")
        return Decomposition(p_model, n_model, model, pf)

    return model.cached(("jordan", tol), build)


class UniformApprox:
    """Cellwise approximant u of p built from a near-achieving partition.

    On the cell [x_{i-1}, x_i] the value is the partition sum of the points
    up to x_{i-1} plus |F(x) - F(x_{i-1})|; the cells paste continuously
    (shared knots are evaluated via the left cell and agree by
    construction).  The defect p - u lies in [0, epsilon) on the
    verification grid whenever the base partition is epsilon-achieving.
    """

    def __init__(self, model: FunctionModel, epsilon, base_partition,
                 prefix, p_function: VariationFunction):
        self.model = model
        self.epsilon = epsilon
        self.base_partition = base_partition
        self.prefix = prefix
        self.p_function = p_function

    def evaluate(self, x):
        if x < self.model.a or x > self.model.b:
            raise SpecFormatError(f"{x} outside [{self.model.a}, {self.model.b}]")
        i = locate_cell(self.base_partition, x)
        return self.prefix[i] + abs(self.model.evaluate(x)
                                    - self.model.evaluate(self.base_partition[i]))

    __call__ = evaluate

    def gap(self, x):
        """p(x) - u(x); non-negative and below epsilon by construction."""
        return self.p_function(x) - self.evaluate(x)


def uniform_approx(model: FunctionModel, epsilon, base_partition=None,
                   verify_points: int = 1024) -> UniformApprox:
    """Approximant u on a partition P with V_a^b(F) - |F(P)| < epsilon.

    Default P is the segment-knot partition, which achieves the supremum
    exactly for finite segmentations (one P serves every epsilon).  A
    custom epsilon-achieving partition may be supplied; validity is
    checked.  The bracket 0 <= p - u < epsilon is asserted on the
    verification grid before returning.
    """
    if epsilon <= 0:
        raise SpecFormatError("epsilon must be positive")
    if not model.continuity_flag:
        raise PreconditionError("uniform approximation requires continuity")
    pf = variation_function(model)
    if base_partition is None:
        estimate = total_variation(model, model.b)
        base = estimate.achieving_partition
    else:
        base = validate_partition(model, base_partition)
        if base[0] != model.a or base[-1] != model.b:
            raise SpecFormatError("base partition must span [a, b]")
    achieved = partition_sum(model, base)
    defect = pf.total - achieved
    if not defect < epsilon:
        raise PreconditionError(
            f"partition misses the variation by {defect}, not below {epsilon}")
    prefix = [Fraction(0) if model.exact else 0.0]
    values = [model.evaluate(x) for x in base]
    for v0, v1 in zip(values, values[1:]):
        prefix.append(prefix[-1] + abs(v1 - v0))
    approx = UniformApprox(model, epsilon, base, prefix, pf)
    if verify_points:
        grid = model.verification_grid(verify_points)
        grace = 0 if model.exact else 10 * model.tol
        for x in grid:
            g = approx.gap(x)
            if g < -grace or not g < epsilon:
                raise PreconditionError(
                    f"approximant defect {g} at {x} escapes [0, {epsilon})")
    return approx
