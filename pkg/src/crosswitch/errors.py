"""Exception hierarchy for the crosswitch package."""
from __future__ import annotations


class CrosswitchError(Exception):
    """Base class for all crosswitch-specific errors."""


class ParseError(CrosswitchError):
    """Malformed or invalid system description (bad JSON, bad schema,
    degree cap exceeded, wrong monomial records)."""


class NonFiniteCoefficients(CrosswitchError):
    """A polynomial coefficient is NaN or infinite."""


class DegenerateInput(ParseError):
    """Structurally invalid input (e.g. polynomial degree above the cap)."""


class NotTransverse(CrosswitchError):
    """An operation that needs the fields transverse to both branches at the
    origin was called on a system with a vanishing component there."""


class NotTransient(CrosswitchError):
    """An operation that needs a transient system (orbits crossing both
    branches near the origin) was called on a non-transient one."""


class EtaUndefined(CrosswitchError):
    """The third-order return-map coefficient was requested although the
    linear part is non-degenerate (alpha != -1)."""


class EvaluationOutsideDomain(CrosswitchError):
    """A sliding field was evaluated where its denominator vanishes."""


class TooManyTangencies(CrosswitchError):
    """More than one tangency point on a half-branch inside the requested
    radius; the single-segment-split decomposition does not apply."""


class LeftDomain(CrosswitchError):
    """A crossing leg of the numeric return map left the working box."""


class StepLimit(CrosswitchError):
    """The integrator exceeded its step budget."""


class InvalidSigns(CrosswitchError):
    """A normal-form/unfolding generator received a sign dictionary with
    missing keys or values outside {-1, +1}."""


class PredictionMismatch(CrosswitchError):
    """An unfolding verification found behaviour that contradicts the
    analytic predictions for the family."""
