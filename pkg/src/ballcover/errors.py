"""Exception types shared across the package."""


class BallCoverError(Exception):
    """Base class for all package-specific failures."""


class DegenerateInput(BallCoverError):
    """Input geometry sits within tolerance of a tangency or containment
    boundary, so an exact verdict cannot be certified."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DegenerateDecision(BallCoverError):
    """A strict comparison required by the decision procedure landed inside
    the tolerance band, so neither branch can be certified."""

    def __init__(self, message, ref_index=None, margin=None):
        super().__init__(message)
        self.ref_index = ref_index
        self.margin = margin


class NumericallyDegenerate(BallCoverError):
    """Vertex enumeration hit a pivot or cancellation below the numeric
    floor; the polyhedron is too ill-conditioned for a certified answer."""


class WitnessExtractionFailed(BallCoverError):
    """The outward/inward stepping loop exhausted its halvings without
    producing a point that passes strict membership checks."""


class MaxIterationsExceeded(BallCoverError):
    """An iterative solver hit its safety cap, which signals degeneracy."""


class RetriesExhausted(BallCoverError):
    """Random instance generation failed to produce an admissible system
    within the configured number of attempts."""


class StepTooCoarse(BallCoverError):
    """The requested grid step yields too few sample points to be useful."""
