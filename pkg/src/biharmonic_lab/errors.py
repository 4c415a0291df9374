"""Exception hierarchy shared by every module."""


class BiharmonicError(Exception):
    """Base class for all library errors."""


class DomainError(BiharmonicError, ValueError):
    """A query point lies outside a declared validity rectangle or interval."""


class SingularMetric(BiharmonicError, ArithmeticError):
    """The metric fails positive-definiteness at an evaluation point."""


class UnsupportedForm(BiharmonicError, TypeError):
    """The requested formula does not apply to this metric form."""


class OrderUnavailable(BiharmonicError, ValueError):
    """Derivatives of the requested order cannot be produced for a field."""


class PrecisionLoss(BiharmonicError, ArithmeticError):
    """Nested finite differencing is too noisy to decide the result."""


class ParameterError(BiharmonicError, ValueError):
    """Family parameters violate the constraints of the construction."""


class EmptyDomain(BiharmonicError, ValueError):
    """No admissible interval exists for the given parameters."""


class EmptyGrid(BiharmonicError, ValueError):
    """A grid specification yields no admissible points."""


class UnknownFamily(BiharmonicError, KeyError):
    """A catalog identifier is not registered."""


class ParseError(BiharmonicError, ValueError):
    """An inline expression or command-line value cannot be parsed."""
