"""Exception types shared across the package."""


class RelaxfeasError(Exception):
    """Base class for all package errors."""


class RankDeficient(RelaxfeasError):
    """Equality matrix does not have (numerically) full row rank."""


class ZeroNormal(RelaxfeasError):
    """A hyperplane normal is zero (or below the zero tolerance)."""


class DimensionMismatch(RelaxfeasError):
    """Inconsistent array shapes in a problem description."""


class NotHomogenized(RelaxfeasError):
    """Operation requires a homogenized system (missing scale-row marker)."""


class ParseError(RelaxfeasError):
    """Malformed instance file.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class PreconditionViolated(RelaxfeasError):
    """A caller-facing precondition does not hold."""


class CombinationFailed(RelaxfeasError):
    """No convex combination of two separators reaches the target distance.

    Diagnostic outcome: the two normals were not detected as opposite, yet
    the best combination falls short of the required ball separation.
    """

    def __init__(self, message, h1=None, h2=None, best_alpha=None, best_distance=None):
        self.h1 = h1
        self.h2 = h2
        self.best_alpha = best_alpha
        self.best_distance = best_distance
        super().__init__(message)


class BadRadius(RelaxfeasError):
    """Search radius too small for the implied-equality interpretation."""


class RadiusOverflow(RelaxfeasError):
    """Containment radius too large to materialize as a float; pass an override."""


class RoundingFailed(RelaxfeasError):
    """Tight-set rounding did not produce a point satisfying the system."""


class VerificationFailed(RelaxfeasError):
    """A solver produced a point that fails re-verification against its input."""


class OracleLimitExceeded(RelaxfeasError):
    """Problem too large for the brute-force oracle."""
