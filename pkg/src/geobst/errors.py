"""Exception types shared across the package."""


class GeoBSTError(Exception):
    """Base class for all model errors."""


class GridRangeError(GeoBSTError):
    """Coordinates outside the key universe or the time horizon."""


class SequenceError(GeoBSTError):
    """An update sequence breaks presence/alternation rules."""


class ModelViolationError(GeoBSTError):
    """A point set contains an invalid cell or is otherwise malformed."""


class ShapeError(GeoBSTError):
    """Input has the wrong overall structure for the requested operation."""


class PreconditionError(GeoBSTError):
    """A documented precondition of an operation does not hold."""


class ReconfigurationError(GeoBSTError):
    """A subtree replacement step is not a legal tree transformation."""


class RootNotInTauError(ReconfigurationError):
    """The replaced subtree does not contain the root."""


class DisconnectedTauError(ReconfigurationError):
    """The replaced node set is not connected within the tree."""


class PendantLinkError(ReconfigurationError):
    """Hanging subtrees cannot all be reattached under the replacement."""


class SetRelationError(ReconfigurationError):
    """The replacement's node set does not match the operation kind."""


class NeighborMissingError(ReconfigurationError):
    """A non-extreme update was attempted without a usable tree neighbor."""


class ConverterInvariantError(GeoBSTError):
    """Internal invariant of the geometry-to-tree converter failed."""
