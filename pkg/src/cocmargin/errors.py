"""Error taxonomy shared across the package.

Plain ``ValueError`` is used for malformed domain inputs (bad probabilities,
out-of-range levels, shape mismatches).  The classes here mark conditions the
CLI maps to its computation exit code.
"""


class CocmarginError(Exception):
    """Base class for package-specific runtime failures."""


class UnsupportedConfiguration(CocmarginError):
    """A structurally valid input that this operation does not support."""


class ResourceLimitError(CocmarginError):
    """An input exceeding a documented size cap."""


class NumericalError(CocmarginError):
    """An internal numerical consistency check failed."""
