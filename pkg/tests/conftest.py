import numpy as np
import pytest

from gossip_age_sim.ctmc import CtmcSpec
from gossip_age_sim.rate_expr import as_rate_expr
from gossip_age_sim.topology import TopologyKind, TopologySpec

RING = TopologySpec(kind=TopologyKind.RING)
GRID = TopologySpec(kind=TopologyKind.GRID)
COMPLETE = TopologySpec(kind=TopologyKind.COMPLETE)
DISCONNECTED = TopologySpec(kind=TopologyKind.DISCONNECTED)


def two_state(q1: float, q2: float, a=COMPLETE, b=RING) -> CtmcSpec:
    return CtmcSpec(
        states=(a, b),
        leave_rates=(as_rate_expr(q1), as_rate_expr(q2)),
        transition_probs=((0.0, 1.0), (1.0, 0.0)),
    )


def single_state(topology: TopologySpec = COMPLETE) -> CtmcSpec:
    return CtmcSpec(
        states=(topology,), leave_rates=(as_rate_expr(1.0),), transition_probs=((0.0,),)
    )


def random_irreducible_chain(rng: np.random.Generator, k: int) -> CtmcSpec:
    """Random K-state chain; a positive full off-diagonal keeps it irreducible."""
    q = rng.uniform(0.5, 3.0, size=k)
    p = rng.uniform(0.1, 1.0, size=(k, k))
    np.fill_diagonal(p, 0.0)
    p = p / p.sum(axis=1, keepdims=True)
    return CtmcSpec(
        states=(COMPLETE,) * k,
        leave_rates=tuple(as_rate_expr(float(x)) for x in q),
        transition_probs=tuple(tuple(row) for row in p),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)
