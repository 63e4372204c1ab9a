"""Exception types shared by all modules.

The CLI maps these onto exit codes: RegionError -> 2, ParameterError -> 3.
"""


class OrthoDerivError(Exception):
    """Base class for library errors."""


class ParameterError(OrthoDerivError, ValueError):
    """Invalid or unsupported parameter values."""


class PoleError(ParameterError):
    """A Gamma function or Pochhammer symbol hits a pole."""


class RegionError(OrthoDerivError, ValueError):
    """Argument outside the region where a formula or series is valid."""


class DivergenceError(RegionError):
    """A series is evaluated where it does not converge."""


class ConvergenceError(OrthoDerivError, RuntimeError):
    """A series or quadrature failed to reach the requested tolerance."""
