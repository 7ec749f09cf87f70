"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class for package errors."""


class ConfigurationError(ArtifactError, ValueError):
    """Invalid space, parameter or input file."""


class MassError(ArtifactError, ValueError):
    """A measure violates a mass precondition (negative, too heavy, unequal)."""


class SpaceMismatchError(ArtifactError, ValueError):
    """Objects living on different spaces were combined."""


class InfiniteEntropyError(ArtifactError, ValueError):
    """Entropy is +inf because a measure charges a point of zero reference weight."""


class SolverError(ArtifactError, RuntimeError):
    """A linear program did not terminate at an optimum."""
