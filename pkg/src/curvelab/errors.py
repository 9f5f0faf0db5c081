"""Exception hierarchy for curvelab.

Every error raised on bad input derives from :class:`CurvelabError` so the CLI
can map it to a usage exit code. Hypothesis failures (a theorem's assumptions
are not met by the graph) derive from :class:`HypothesisFailed`.
"""


class CurvelabError(ValueError):
    """Base class for all curvelab input and contract errors."""


class VertexOutOfSupport(CurvelabError):
    pass


class EdgeOutOfSupport(CurvelabError):
    pass


class EmptyInterval(CurvelabError):
    pass


class WeightUndefined(CurvelabError):
    """Raised when a weight or measure is requested where the model has no value."""


class DimensionBelowTwo(CurvelabError):
    pass


class DimensionNotAboveTwo(CurvelabError):
    pass


class DimensionBelowFour(CurvelabError):
    pass


class NonPositiveArgument(CurvelabError):
    pass


class NotNormalized(CurvelabError):
    pass


class MeasureKindUnsupported(CurvelabError):
    pass


class UnsupportedSupport(CurvelabError):
    pass


class NotComplete(CurvelabError):
    pass


class NotConcave(CurvelabError):
    pass


class NotPositive(CurvelabError):
    pass


class ParameterOrderViolated(CurvelabError):
    pass


class RadiusExceedsSupport(CurvelabError):
    pass


class Disconnected(CurvelabError):
    pass


class NotWeaklySymmetric(CurvelabError):
    pass


class InconsistentSpec(CurvelabError):
    pass


class GraphTooLarge(CurvelabError):
    pass


class HypothesisFailed(CurvelabError):
    """A theorem's hypothesis does not hold on the given graph.

    Attributes
    ----------
    vertex : int or None
        First vertex where the hypothesis was found to fail.
    """

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class CdHypothesisFailed(HypothesisFailed):
    pass
