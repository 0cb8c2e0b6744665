"""Exception hierarchy shared by all surfiso modules."""


class SurfisoError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SurfisoError):
    """Invalid or mutually inconsistent input data."""


class ParseError(InputError):
    """A parametrization file or polynomial string could not be parsed."""


class ExtensionRequiredError(SurfisoError):
    """A computation needs a field extension beyond the single supported
    generator.  ``factor`` names the irreducible polynomial that failed to
    split."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class EmptySeriesError(SurfisoError):
    """A linear series turned out to be zero-dimensional (h0 = 0) where a
    nonempty one was required."""


class ContractError(SurfisoError):
    """A reducer or construction was applied outside its stated condition."""


class BaseCaseUnsupportedError(SurfisoError):
    """The reduction classified a base case (B3/B4/B5) whose
    reparametrization super-set is out of scope."""

    def __init__(self, message, tag=None):
        super().__init__(message)
        self.tag = tag


class InversionError(SurfisoError):
    """A rational map could not be inverted within the search budget, or the
    round-trip verification failed."""


class InternalConsistencyError(SurfisoError):
    """An internal invariant failed; indicates a bug rather than bad input."""
