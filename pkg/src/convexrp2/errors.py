"""Exception types shared across the library.

Every numerical failure mode gets its own class so callers (and the CLI)
can distinguish "your input is outside the domain of the operation" from
genuine bugs.
"""


class ConvexRP2Error(Exception):
    """Base class for all library errors."""


class DegenerateSpan(ConvexRP2Error):
    """Two vectors expected to span a plane are (numerically) parallel."""


class NonGenericFlags(ConvexRP2Error):
    """A flag tuple fails one of the required direct-sum conditions."""


class DegenerateCrossRatio(ConvexRP2Error):
    """Cross ratio requested with a coincident forbidden pair."""


class NotPositive(ConvexRP2Error):
    """A configuration invariant that must be positive is not.

    The offending key is carried in ``args[0]`` when known.
    """


class NotLoxodromic(ConvexRP2Error):
    """Matrix does not have three distinct positive real eigenvalues."""


class GluingInconsistent(ConvexRP2Error):
    """Flag development across a glued edge produced degenerate data."""


class NoValidLift(ConvexRP2Error):
    """No admissible puncture lift was found for a curve class."""


class PointOutsideDomain(ConvexRP2Error):
    """A point expected inside a convex domain is not interior."""


class RegionOutsideDomain(ConvexRP2Error):
    """An integration region is not contained in the domain closure."""


class NoConvergence(ConvexRP2Error):
    """A truncation/extrapolation sequence failed to settle."""


class InsufficientSamples(ConvexRP2Error):
    """A Monte-Carlo routine was asked for fewer samples than allowed."""


class UnsupportedArgument(ConvexRP2Error):
    """Argument outside the supported parameter range (e.g. polylog x > 0)."""
