"""Exception hierarchy shared by all modules."""


class MinsurfError(Exception):
    """Base class for every error raised by the package."""


class PoleError(MinsurfError, ZeroDivisionError):
    """A rational function was evaluated at (or numerically near) a pole."""


class DomainError(MinsurfError, ValueError):
    """A point lies outside the closed disk domain."""


class ValidationError(MinsurfError, ValueError):
    """Weierstrass data failed validation but an operation requires valid data."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BoundaryError(MinsurfError, ValueError):
    """A finite-difference stencil left the grid mask."""


class UnreachableError(MinsurfError, ValueError):
    """A grid cell is masked out or not reachable from the source."""


class HypothesisError(MinsurfError):
    """Preconditions of a comparison check are not met; the check is inapplicable."""


class DivisionByIncidence(MinsurfError, ZeroDivisionError):
    """A coordinate function was evaluated on its denominator hyperplane."""


class FlatSurfaceError(MinsurfError):
    """Renormalization is undefined because the curvature vanishes."""


class ConfigError(MinsurfError, ValueError):
    """Malformed experiment configuration or input file."""


class GeneralPositionError(MinsurfError):
    """The hyperplane set is not in general position."""

    def __init__(self, witness):
        super().__init__(f"hyperplanes not in general position; dependent subset {list(witness)}")
        self.witness = tuple(witness)


class UnknownEntry(MinsurfError, KeyError):
    """No catalog entry with the requested name."""
