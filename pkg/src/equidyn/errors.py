"""Exception taxonomy.

Every class carries the process exit code the CLI maps it to:
2 = invalid configuration or experiment setup, 3 = numerical solver
failure, 4 = a declared budget was exceeded.
"""


class EquidynError(Exception):
    exit_code = 1


class ConfigError(EquidynError):
    exit_code = 2


class SpaceMismatch(EquidynError):
    exit_code = 2


class ExceptionalStart(EquidynError):
    """Backward sampling started inside the detected exceptional set."""

    exit_code = 2


class NotPeriodic(EquidynError):
    exit_code = 2


class NotDominant(EquidynError):
    """Operation requires a map with dominant topological degree."""

    exit_code = 2


class DegeneratePeriod(EquidynError):
    """det(A^n - I) = 0: period-n points are not isolated."""

    exit_code = 2


class ProjectionFailure(EquidynError):
    """Atoms too far from the 1-d support required by the reference."""

    exit_code = 2


class NearIndeterminacy(EquidynError):
    """Fiber target too close to the compactified indeterminacy locus."""

    exit_code = 2


class DegenerateMap(EquidynError):
    """p and q share a root on P^1 within tolerance."""

    exit_code = 2


class DegenerateImage(EquidynError):
    """Both homogeneous components vanished at the evaluation point."""

    exit_code = 3


class ChartSingularity(EquidynError):
    exit_code = 3


class SolverDiverged(EquidynError):
    exit_code = 3


class ContinuationAmbiguous(EquidynError):
    """Root matching stayed ambiguous at the smallest continuation step."""

    exit_code = 3


class PrecisionExhausted(EquidynError):
    exit_code = 3


class DerivativeSingular(EquidynError):
    """Too many sample atoms sat on critical points of the map."""

    exit_code = 3


class NoBranchSurvived(EquidynError):
    exit_code = 3


class AtomBudgetExceeded(EquidynError):
    exit_code = 4


class DegreeBudgetExceeded(EquidynError):
    exit_code = 4
