"""Library-wide numerical defaults."""

import os

DEFAULT_TOL = 1e-10
TOL_ENV_VAR = "ORTHODERIV_TOL"
MAX_TERMS = 10**6
REGION_MARGIN = 1e-12


def resolve_tol(tol=None):
    """Return `tol`, or the environment override, or the library default."""
    if tol is not None:
        return float(tol)
    env = os.environ.get(TOL_ENV_VAR)
    if env:
        value = float(env)
        if not value > 0:
            raise ValueError(f"{TOL_ENV_VAR} must be positive, got {env!r}")
        return value
    return DEFAULT_TOL
