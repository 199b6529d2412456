"""Exception hierarchy shared by all modules."""


class SpectralError(Exception):
    """Base class for errors raised by this package."""


class IntegrationError(SpectralError):
    """The transition-matrix integrator failed or the spectral parameter is out of range."""


class AmbiguousSheetError(SpectralError):
    """A Floquet multiplier was requested too close to a branch point without a tracking path."""


class PoleError(SpectralError):
    """A quantity was evaluated at (or numerically too close to) one of its poles."""


class DivisorPoleError(PoleError):
    """The coefficient A or a derived quantity was evaluated at a divisor point."""


class DegenerateDivisorError(SpectralError):
    """A divisor point coincides with a gap edge."""


class DegenerateTransformError(SpectralError):
    """A linear-fractional transform with vanishing determinant."""


class GridMismatchError(SpectralError):
    """Two gradient fields sampled on different grids were combined."""
