"""Exception types shared across the package."""


class BirthContourMissing(ValueError):
    """A birth log-likelihood references a contour no dead point carries."""


class BirthChainAmbiguous(ValueError):
    """A birth contour matches more successors than available predecessors."""


class SliceBracketError(RuntimeError):
    """Slice sampling failed to find an in-slice point within the shrink cap."""


class FormatVersionError(ValueError):
    """A run file declares a format version this reader does not support."""
