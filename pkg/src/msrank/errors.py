"""Exception types shared across the package.

Every operation raises one of these named errors instead of a bare
ValueError so callers (and the CLI) can map failures to exit codes.
"""


class NonPositiveWeight(ValueError):
    """A product weight (or a prefix weight fed to the welfare formula) is <= 0."""


class PricesNotDecreasing(ValueError):
    """A segment's reservation price vector is not weakly decreasing or has a negative entry."""


class ProportionsNotNormalized(ValueError):
    """Segment proportions do not sum to one (or contain a negative entry)."""


class EmptyInstance(ValueError):
    """Instance has no products or no segments."""


class NonPositiveCost(ValueError):
    """Search cost must be strictly positive."""


class BracketExhausted(RuntimeError):
    """Root bracketing for the reservation-price equation failed within bounds."""


class CostsNotIncreasing(ValueError):
    """Cumulative search costs must be strictly positive and weakly increasing."""


class BudgetExceeded(RuntimeError):
    """Requested exhaustive search is larger than the permutation budget."""


class NotBoundedRatio(ValueError):
    """Instance violates the bounded weight-ratio precondition for this operation."""


class TrivialCaseNotHandled(ValueError):
    """max weight exceeds 1/eps; caller must dispatch to the trivial-case assignment first."""


class GuessInfeasible(ValueError):
    """A guessed statistics vector cannot be realized by the available products."""


class MissingHeadProduct(ValueError):
    """A partition designates a head class for some block but owns no product of that class."""


class MalformedThreePartition(ValueError):
    """3-partition input violates size, sum, or element-range requirements."""


class NotAValidPartition(ValueError):
    """Claimed triplet cover is not a partition of the items (or a triple misses the target sum)."""


class IoError(RuntimeError):
    """File could not be read, parsed, or written."""


class BadSpec(ValueError):
    """Random-generation spec has inconsistent or out-of-range fields."""
