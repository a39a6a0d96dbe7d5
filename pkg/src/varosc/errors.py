"""Exception hierarchy shared by all modules."""


class VarOscError(Exception):
    """Base class for every error raised by varosc."""


class InvalidArgument(VarOscError, ValueError):
    pass


class NotLacunaryError(InvalidArgument):
    """Raised when a sequence fails the lacunarity test.

    ``index`` is the 0-based position of the offending term (the larger term
    of the failing consecutive pair), or ``None`` when not applicable.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotPositiveSemidefinite(VarOscError, ValueError):
    pass


class ContractViolation(VarOscError, ValueError):
    """An operator does not satisfy the role it is used under."""


class ResourceError(VarOscError, RuntimeError):
    """A configured work or dimension budget would be exceeded."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget
