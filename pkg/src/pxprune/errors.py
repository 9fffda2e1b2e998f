"""Exception types shared across the toolkit."""


class PxpruneError(Exception):
    """Base class for all toolkit errors."""


class EmptyImage(PxpruneError):
    """Image has zero width or height."""


class DimensionNotDivisible(PxpruneError):
    """Image dimensions are not block multiples and padding is disabled."""


class NoNeighborAvailable(PxpruneError):
    """Prediction requested with no causal neighbor (caller bug)."""


class ShapeMismatch(PxpruneError):
    """Blocks being compared do not share dimensions or channel count."""


class MalformedStream(PxpruneError):
    """Compressed stream violates structural invariants."""


class UnsupportedVersion(MalformedStream):
    """Container carries a format version this decoder does not know."""


class ConfigMismatch(PxpruneError):
    """Stream entries are inconsistent with the declared grid geometry."""


class EmptyCorpus(PxpruneError):
    """Corpus statistics requested over zero images."""


class AllImagesFailed(PxpruneError):
    """Every image in the corpus failed to decode."""


class NotMergeDivisible(PxpruneError):
    """Patch count does not split into whole merge groups."""


class BudgetOutOfRange(PxpruneError):
    """Baseline token budget outside [1, total blocks]."""


class BudgetTooSmall(PxpruneError):
    """Resize budget cannot fit even a single block."""
