"""Exception types shared across the toolkit."""


class BVKitError(Exception):
    """Base class for all toolkit errors."""


class OutOfDomainError(BVKitError):
    """A point lies outside the closed domain of a function model."""


class SpecFormatError(BVKitError):
    """A document or constructor argument does not match the expected schema."""


class InfiniteSegmentationError(BVKitError):
    """Monotone segmentation does not terminate on this model.

    Raised for oscillating pieces whose domain contains the accumulation
    point of their critical points.  ``hint`` describes the truncation
    that makes the piece tractable.
    """

    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message)
        self.hint = hint


class UnresolvedOscillationError(BVKitError):
    """Variation refinement hit its cap without converging.

    ``lower_bound`` carries the certified partial lower bound reached
    before giving up.
    """

    def __init__(self, message: str, lower_bound=None, estimate=None):
        super().__init__(message)
        self.lower_bound = lower_bound
        self.estimate = estimate


class NotBVError(BVKitError):
    """The model failed a bounded-variation check."""


class PreconditionError(BVKitError):
    """An operation's stated precondition does not hold for the arguments."""


class CertificateFailure(BVKitError):
    """A certificate ledger inequality or containment check failed.

    ``detail`` identifies the offending cell, family or component together
    with both sides of the failed inequality.
    """

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail
