"""Berezin-Toeplitz matrices on Landau levels and the asymptotics of their eigenvalue clusters."""
from .errors import (
    ConfigError,
    DomainError,
    LandauClustersError,
    QuadratureError,
    ThresholdError,
    TruncationError,
)
from .potentials import Bump, Potential

__all__ = [
    "Bump",
    "ConfigError",
    "DomainError",
    "LandauClustersError",
    "Potential",
    "QuadratureError",
    "ThresholdError",
    "TruncationError",
]
__version__ = "0.1.0"
