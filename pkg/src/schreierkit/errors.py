"""Exception hierarchy shared by every module."""


class SchreierKitError(Exception):
    """Base class for domain errors (CLI exit status 1)."""


class PreconditionError(SchreierKitError, ValueError):
    pass


class VerificationError(SchreierKitError):
    """A constructed object failed its mandatory brute-force check."""


class CapExceeded(SchreierKitError):
    """A configured size cap or search budget was exhausted (CLI exit status 2)."""


class OrdinalOverflowError(SchreierKitError, ArithmeticError):
    pass
