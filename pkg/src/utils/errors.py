"""Error handling utilities."""

from typing import Optional


class HdrgError(Exception):
    """Base exception for the HDRG decoder package."""
    pass


class InvalidSizeError(HdrgError):
    """Lattice size outside the supported range."""
    pass


class InvalidPairError(HdrgError):
    """Node pair that cannot be joined by a chain (both virtual)."""
    pass


class SyndromeNotTrivialError(HdrgError):
    """Logical test requested on a residual that still carries anyons."""
    pass


class LatticeTooSmallError(HdrgError):
    """Adversarial construction does not fit, or does not defeat the decoder."""
    pass


class DecoderInvariantError(HdrgError):
    """Internal decoder invariant violated."""
    pass


class OracleTooLargeError(HdrgError):
    """Exhaustive enumeration requested beyond the configured qubit limit."""
    pass


class UnsupportedModelError(HdrgError):
    """Noise model not supported by the requested estimator."""
    pass


class InvalidFitPointError(HdrgError):
    """Estimate record unusable for a fit (P outside (0, 1), too few points)."""
    pass


class NoCrossingError(HdrgError):
    """No crossing of logical error rate curves inside the scanned range."""
    pass


class SweepError(HdrgError):
    """A single sweep point failed."""

    def __init__(self, message: str, point_key: Optional[str] = None):
        super().__init__(message)
        self.point_key = point_key
