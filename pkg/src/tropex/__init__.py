"""Exact SL+(2,Z) exhaustion sums and tropical caustics of convex domains."""
from .errors import DomainError, NotConcaveError, OutsideConeError, PrecisionError, TropexError

__version__ = "0.1.0"

__all__ = ["DomainError", "NotConcaveError", "OutsideConeError", "PrecisionError", "TropexError",
           "__version__"]
