"""Exception hierarchy shared across the package."""


class GossipSimError(Exception):
    """Base class for all package errors."""


class ConfigurationError(GossipSimError):
    """Invalid topology, CTMC, or simulation configuration."""


class AnalysisError(GossipSimError):
    """CTMC analysis failed (reducible chain, singular system, ...)."""


class FitError(GossipSimError):
    """Scaling-law fit cannot be performed on the given data."""


class AggregationError(GossipSimError):
    """Sweep rows cannot be aggregated (mixed metrics in one group)."""


class RuntimeGuardError(GossipSimError):
    """A runtime guard tripped (e.g. spread experiment exceeded its time cap)."""
