class DenoisingError(Exception):
    """
    Base class for all errors raised by the denoiser.
    """
    pass


class InvalidInputError(DenoisingError, ValueError):
    """
    Raised when an image, a parameter set or a geometry does not satisfy the preconditions of an operation.
    """
    pass


class InternalError(DenoisingError, RuntimeError):
    """
    Raised when an invariant that the algorithm guarantees by construction is found broken.
    """
    pass
