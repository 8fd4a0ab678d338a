class InvalidArgument(ValueError):
    """Raised when an argument violates an operation's precondition."""


class CapacityError(InvalidArgument):
    """Raised when a problem does not fit on the requested hardware graph."""


class EmbeddingError(ValueError):
    """Raised when an embedding cannot represent a logical model."""
