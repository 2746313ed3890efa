"""Exception types shared across the package.

The split mirrors how the CLI reports failures: input/contract problems
(exit code 2) versus numerical failures discovered mid-computation
(exit code 3).
"""


class SmearyError(Exception):
    """Base class for all package-specific errors."""


class ContractViolationError(SmearyError, ValueError):
    """An argument breaks a documented precondition (wrong shape, not a
    tangent vector, malformed configuration)."""


class DomainError(SmearyError, ValueError):
    """A numeric argument lies outside the admissible domain, e.g. a chart
    vector with norm >= pi or a mixture weight outside (0, 1)."""


class CutLocusError(SmearyError, ValueError):
    """The requested map is undefined at the cut locus (antipodal pair)."""


class SeriesTruncationError(SmearyError, ArithmeticError):
    """A series evaluation failed to reach the requested tolerance within
    its term cap."""


class RootBracketError(SmearyError, ArithmeticError):
    """A root finder found no sign change on its bracket.  For the mean-set
    radius this signals a subcritical family (beta <= 0)."""


class DegenerateDataError(SmearyError, ValueError):
    """Input data carries no usable signal (zero variance, V = 0 rows)."""
