"""Shared exception types.

Every failure mode that callers are expected to branch on gets its own
class here; anything else is a plain ValueError at the offending call.
"""


class IwalabError(Exception):
    """Base class for all package-specific errors."""


class ContextMismatch(IwalabError):
    """Operands belong to different (p, precision) contexts."""


class NotAUnit(IwalabError):
    """Inversion was requested for an element of positive valuation."""


class ZeroPolynomial(IwalabError):
    """The zero polynomial was passed where a nonzero one is required."""


class NotDistinguished(IwalabError):
    """A divisor must be distinguished (monic, lower coefficients in pZ_p)."""


class InsufficientDegreeCap(IwalabError):
    """The truncation order T^D is too small for the requested operation."""


class PrecisionExhausted(IwalabError):
    """The answer is not determined at working precision p^N."""


class BadLevels(IwalabError):
    """Level indices violate the required ordering (e.g. m <= n for a lift)."""


class NotTStable(IwalabError):
    """A subgroup that must be closed under the T-action is not."""


class NotAPBase(IwalabError):
    """The given elements are not an independent generating p-base."""


class InsufficientData(IwalabError):
    """Too few usable entries in a growth series."""


class InconsistentSeries(IwalabError):
    """A frozen size grew again later in the series."""


class SpecFileError(IwalabError):
    """A module description file failed to parse.

    The message carries the position of the offending field, e.g.
    "summands[1].coeffs: leading coefficient must be 1".
    """
