"""Exception hierarchy shared by every module of the workbench."""


class VietorisError(Exception):
    """Base class for all errors raised by this package."""


class CycleError(VietorisError, ValueError):
    """A generating relation closes into a nontrivial cycle."""


class NotMonotoneError(VietorisError, ValueError):
    pass


class GenerationError(VietorisError):
    """A random instance generator could not produce a valid instance."""


class VariantError(VietorisError, ValueError):
    pass


class VariantMismatch(VietorisError, ValueError):
    pass


class SizeError(VietorisError):
    """A construction would exceed a configured size cap."""


class PreconditionError(VietorisError, ValueError):
    pass


class StructureError(VietorisError, ValueError):
    """An algebraic table violates the laws it is supposed to satisfy."""


class ArityError(VietorisError, ValueError):
    pass


class FormatError(VietorisError, ValueError):
    """Malformed external (JSON) input. ``where`` names the offending field."""

    def __init__(self, message, where=None):
        self.where = where
        if where:
            message = f"{where}: {message}"
        super().__init__(message)
