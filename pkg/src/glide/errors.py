"""Exception types shared across the package."""


class GlideError(Exception):
    """Base class for all library errors."""


class CycleDetected(GlideError):
    pass


class UnknownNode(GlideError):
    pass


class DuplicateEdge(GlideError):
    pass


class NodeOutOfRange(GlideError):
    pass


class InfeasibleEdgeCount(GlideError):
    pass


class NonFiniteValue(GlideError):
    pass


class EmptyDataset(GlideError):
    pass


class LengthMismatch(GlideError):
    pass


class DegenerateCategory(GlideError):
    pass


class InsufficientRows(GlideError):
    pass


class EnvironmentTooSmall(GlideError):
    pass


class CandidateExplosion(GlideError):
    pass


class NodeSetMismatch(GlideError):
    pass
