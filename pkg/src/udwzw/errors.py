class UdwzwError(Exception):
    """Base class for library errors."""


class UnsupportedAlgebraError(UdwzwError):
    pass


class DomainError(UdwzwError, ValueError):
    pass


class CutoffError(UdwzwError):
    """A mode index left the configured truncation window."""


class ResolutionError(UdwzwError):
    """Lattice data too rough for spectral differentiation."""


class TruncationError(UdwzwError):
    """Truncated symplectic matrix is too ill-conditioned to invert."""


class SamplingError(UdwzwError):
    pass


class ConfigError(UdwzwError, ValueError):
    pass
