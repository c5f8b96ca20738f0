"""Exception types shared across the package."""


class QappolyError(ValueError):
    """Base class for all input-validation failures."""


class InvalidPermutationError(QappolyError):
    pass


class InvalidParameterError(QappolyError):
    """A family parameter set violates one of its stated conditions.

    The message names the violated condition.
    """


class DimensionMismatchError(QappolyError):
    pass


class CapExceededError(QappolyError):
    """A request exceeds a configured enumeration or search cap."""


class GraphParseError(QappolyError):
    """Graph file could not be parsed; message carries the line number."""


class ProtocolInputError(QappolyError):
    pass
