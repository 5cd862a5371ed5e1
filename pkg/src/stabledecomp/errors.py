"""Exception hierarchy.

Input problems derive from :class:`ValidationError` (a ``ValueError``);
negative verdicts that callers must tell apart from numerical failure
(``NotAComponent``, ``NotStationary``) do not.
"""


class StableDecompError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(StableDecompError, ValueError):
    """Malformed or inconsistent input."""


class AlphaOutOfRange(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class ZeroColumn(ValidationError):
    """A point where every spectral function vanishes (full support violated)."""

    def __init__(self, label):
        super().__init__(f"point {label!r} has an all-zero column")
        self.label = label


class FullSupportViolation(ZeroColumn):
    pass


class DuplicateLabel(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class TimesMismatch(ValidationError):
    pass


class AlphaMismatch(ValidationError):
    pass


class WeightNormViolation(ValidationError):
    def __init__(self, point, total):
        super().__init__(f"sum_k |r_k|^alpha = {total:.12g} at point {point!r}, expected 1")
        self.point = point
        self.total = total


class NonMonotone(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class NonPositiveThreshold(ValidationError):
    pass


class EmptySample(ValidationError):
    pass


class InvalidFlow(ValidationError):
    """Generators that do not define an action of the torus, or an inconsistent cocycle."""


class NotATorusIndex(ValidationError):
    pass


class NotInvariant(ValidationError):
    def __init__(self, k, orbit):
        super().__init__(f"weight r_{k} is not constant on orbit {list(orbit)}")
        self.k = k
        self.orbit = tuple(orbit)


class ZeroKernelSheet(ValidationError):
    def __init__(self, sheet):
        super().__init__(f"kernel vanishes identically on sheet {sheet!r}")
        self.sheet = sheet


class NotMeasurePreserving(ValidationError):
    pass


class NotAComponent(StableDecompError):
    """The candidate's spectral measure is not dominated by the process's."""

    def __init__(self, direction, reason="direction absent from the process"):
        direction = tuple(float(x) for x in direction)
        super().__init__(f"{reason}: {direction}")
        self.direction = direction
        self.reason = reason


class NotStationary(StableDecompError):
    pass


class InvarianceViolation(StableDecompError):
    """An internal invariant that the theory guarantees was found broken."""
