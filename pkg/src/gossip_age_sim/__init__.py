"""Version-age-of-information simulator for gossip networks whose topology
switches among a finite set of graphs according to a CTMC."""

from .ctmc import (
    CtmcAnalysis,
    CtmcSpec,
    generator_matrix,
    return_time_moments,
    sample_trajectory,
    stationary_distribution,
)
from .engine import (
    RunResult,
    SimConfig,
    SimMode,
    run,
    run_naive,
    spread_experiment,
    spread_stage_times,
)
from .errors import (
    AggregationError,
    AnalysisError,
    ConfigurationError,
    FitError,
    GossipSimError,
    RuntimeGuardError,
)
from .metrics import ScalingFit, ScalingModel, SweepRow, SweepTable, aggregate, compare_models, fit_scaling
from .rate_expr import RateExpr, parse_rate_expr
from .topology import Graph, GossipRateTable, TopologyKind, TopologySpec, build_topology, gossip_rates

__version__ = "0.1.0"
