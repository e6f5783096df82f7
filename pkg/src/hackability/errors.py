"""Exception hierarchy shared by every module."""


class HackabilityError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(HackabilityError, ValueError):
    pass


class SetMismatch(HackabilityError, ValueError):
    """Two orderings (or results) refer to policy sets of different size."""


class CapExceeded(HackabilityError):
    """An enumeration would exceed its configured size cap."""


class ParseError(HackabilityError, ValueError):
    pass


class UnknownFormat(HackabilityError, ValueError):
    pass


class NotRepresentable(HackabilityError):
    """An ordering supplied by the user has no realizing reward."""


class NoDistinctOccupancies(HackabilityError):
    """Every policy in the set has the same visit counts."""


class NoUnhackableNonEquivalent(HackabilityError):
    """No non-trivial, unhackable, non-equivalent reward exists for the set.

    Raised by the constructive search once the exhaustive fallback over all
    weak orders comes up empty (happens when the occupancies are collinear).
    """


class FilterTooTight(HackabilityError):
    """Rejection sampling accepted too few policies."""


class MdpValidationError(HackabilityError, ValueError):
    """A rewardless MDP violates a standing assumption.

    ``violations`` lists every problem found, not only the first one.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else [message]


class NonStochasticRow(MdpValidationError):
    pass


class UnreachableState(MdpValidationError):
    pass


class DiscountOutOfRange(MdpValidationError):
    pass


class TooFewActions(MdpValidationError):
    pass
