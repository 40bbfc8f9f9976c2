"""Exception hierarchy shared across the package."""

from __future__ import annotations


class BakerlabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BakerlabError):
    """Malformed or out-of-domain experiment configuration."""


class CertificationError(BakerlabError):
    """A quantity could not be certified at the requested tolerance."""


class UncertifiedPointError(CertificationError):
    """Point is not certified to lie in the invariant domain."""


class PoleProximityError(CertificationError):
    """Evaluation or iteration got too close to a pole."""


class RefinementLimitError(CertificationError):
    """Loop refinement exceeded the vertex cap (loop approaching a pole)."""


class AmbiguousWindingError(CertificationError):
    """Winding query point too close to a polyline edge to be decidable."""
