"""Exception hierarchy.  Every error carries a short machine-readable ``kind``."""


class LandauClustersError(Exception):
    kind = "error"


class DomainError(LandauClustersError, ValueError):
    """Input outside the mathematical domain of an operation."""

    kind = "domain"


class ThresholdError(DomainError):
    """Moment order violates ell > 1/(rho - 1)."""

    kind = "threshold"


class QuadratureError(LandauClustersError):
    """A quadrature failed its own refinement check."""

    kind = "quadrature"


class TruncationError(LandauClustersError):
    """A finite box or range cuts off non-negligible mass."""

    kind = "truncation"


class ConfigError(LandauClustersError, ValueError):
    kind = "config"
