"""Generalized totients Phi_k(n), their distribution and extremal orders."""

from .arith import DEFAULT_CONSTANTS, Constants, factorize, primes_up_to, primorial
from .counting import bateman_count, classify_regime, count_phi_ratio, empirical_cdf
from .errors import ArgumentError, CapacityError, GeometryError, PrecisionError, TotlabError
from .totient import phi_k, phi_k_brute, phi_k_range

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "CapacityError",
    "Constants",
    "DEFAULT_CONSTANTS",
    "GeometryError",
    "PrecisionError",
    "TotlabError",
    "bateman_count",
    "classify_regime",
    "count_phi_ratio",
    "empirical_cdf",
    "factorize",
    "phi_k",
    "phi_k_brute",
    "phi_k_range",
    "primes_up_to",
    "primorial",
]
