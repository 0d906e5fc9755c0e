"""Local, partially local, no-signaling and quantum correlations: criteria, bounds and models."""

from .errors import InvariantError, SizeCapError

__all__ = ["InvariantError", "SizeCapError"]
__version__ = "0.1.0"
