"""Exception hierarchy.

Every domain error carries a stable ``token`` (the class name) which the
command line reports verbatim.
"""


class TreeLocalError(Exception):
    """Base class of all domain errors raised by the package."""

    @property
    def token(self):
        return type(self).__name__


class CapExceeded(TreeLocalError):
    pass


class SizeExceeded(TreeLocalError):
    pass


class DegreeTooLarge(TreeLocalError):
    pass


class NotTransitive(TreeLocalError):
    pass


class UnknownVertex(TreeLocalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotAutomorphism(TreeLocalError):
    pass


class EdgeInversion(TreeLocalError):
    pass


class NoTransporter(TreeLocalError):
    pass


class HypothesisViolated(TreeLocalError):
    pass


class BadTransporter(TreeLocalError):
    pass


class NotCovering(TreeLocalError):
    pass


class SingularVertex(TreeLocalError):
    pass


class OutOfDomain(TreeLocalError):
    pass


class EmptyCoset(TreeLocalError):
    pass


class NotStabilized(TreeLocalError):
    pass


class BadChoice(TreeLocalError):
    pass


class InvalidComplex(TreeLocalError):
    pass


class FormatError(TreeLocalError):
    """Malformed input file."""
