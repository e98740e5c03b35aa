"""Exception hierarchy shared by all mbrep modules."""


class MbrepError(Exception):
    """Base class for every error raised by mbrep."""


class ValidationError(MbrepError, ValueError):
    """Invalid base system, digit set or argument."""


class ResourceLimitError(MbrepError):
    """A configured size or memory cap would be exceeded."""


class BudgetExceededError(MbrepError):
    """No representation exists within the requested weight budget."""


class UnrepresentableError(MbrepError):
    """The integer provably has no representation in the system."""


class DigitOverflowError(MbrepError):
    """An accumulated multiplicity is not an admissible digit."""


class MissingTableEntryError(MbrepError):
    """A preprocessing table lacks the entry the greedy splice needs."""


class CollisionError(MbrepError):
    """A table splice collides with a greedy term and cannot be merged."""


class PrecisionError(MbrepError):
    """The working precision cannot certify the requested computation."""


class MalformedStreamError(MbrepError):
    """A serialized message cannot be decoded."""


class FieldOverflowError(MbrepError):
    """A value does not fit the fixed-width field reserved for it."""
