"""Exception types raised by pgamesh."""


class PGAError(ValueError):
    """Base class for all numeric/geometric errors in this package."""


class DegenerateVersorError(PGAError):
    pass


class IdealElementError(PGAError):
    pass


class UnsupportedBivectorError(PGAError):
    pass


class NoIntersectionError(PGAError):
    pass


class MalformedMeshError(PGAError):
    pass


class DegeneratePlaneError(PGAError):
    pass


class NonUnitRotorError(PGAError):
    pass


class NonSymmetricFrameError(PGAError):
    pass


class ConvergenceError(PGAError):
    """Jacobi iteration did not converge; ``partial`` holds the last iterate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ParseError(Exception):
    """Mesh file could not be parsed. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ZeroVolumeError(PGAError):
    """A quantity needs division by an enclosed volume that is zero."""
