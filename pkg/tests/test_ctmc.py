import numpy as np
import pytest

from conftest import COMPLETE, RING, random_irreducible_chain, single_state, two_state
from gossip_age_sim.ctmc import (
    CtmcSpec,
    analyze,
    empirical_occupancy,
    generator_matrix,
    return_time_moments,
    sample_return_intervals,
    sample_trajectory,
    stationary_distribution,
)
from gossip_age_sim.errors import AnalysisError, ConfigurationError
from gossip_age_sim.rate_expr import as_rate_expr


def cycle4(q: float = 1.0) -> CtmcSpec:
    p = (
        (0.0, 0.5, 0.0, 0.5),
        (0.5, 0.0, 0.5, 0.0),
        (0.0, 0.5, 0.0, 0.5),
        (0.5, 0.0, 0.5, 0.0),
    )
    return CtmcSpec(
        states=(COMPLETE, RING, COMPLETE, RING),
        leave_rates=tuple(as_rate_expr(q) for _ in range(4)),
        transition_probs=p,
    )


def test_generator_two_state():
    Q = generator_matrix(two_state(1.0, 2.0), 50)
    assert np.allclose(Q, [[-1.0, 1.0], [2.0, -2.0]])


def test_generator_single_state_disables_switching():
    Q = generator_matrix(single_state(), 10)
    assert Q.shape == (1, 1) and Q[0, 0] == 0.0


def test_generator_cycle():
    Q = generator_matrix(cycle4(), 100)
    assert np.allclose(np.diag(Q), -1.0)
    assert Q[0, 1] == 0.5 and Q[0, 3] == 0.5 and Q[0, 2] == 0.0
    assert np.allclose(Q.sum(axis=1), 0.0)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        CtmcSpec(
            states=(COMPLETE, RING),
            leave_rates=(as_rate_expr(1.0), as_rate_expr(1.0)),
            transition_probs=((0.5, 0.5), (1.0, 0.0)),  # nonzero diagonal
        )
    with pytest.raises(ConfigurationError):
        CtmcSpec(
            states=(COMPLETE, RING),
            leave_rates=(as_rate_expr(1.0), as_rate_expr(1.0)),
            transition_probs=((0.0, 0.7), (1.0, 0.0)),  # row sum != 1
        )


def test_stationary_two_state_balance():
    pi = stationary_distribution(generator_matrix(two_state(1.0, 2.0), 10))
    assert pi == pytest.approx([2 / 3, 1 / 3])
    pi = stationary_distribution(generator_matrix(two_state(3.0, 1.0), 10))
    assert pi == pytest.approx([1 / 4, 3 / 4])


def test_stationary_cycle_uniform():
    pi = stationary_distribution(generator_matrix(cycle4(), 10))
    assert pi == pytest.approx([0.25] * 4)


def test_stationary_residual_small(rng):
    for k in (2, 3, 4, 5, 6):
        spec = random_irreducible_chain(rng, k)
        Q = generator_matrix(spec, 100)
        pi = stationary_distribution(Q)
        assert np.max(np.abs(pi @ Q)) <= 1e-10
        assert pi.sum() == pytest.approx(1.0)
        assert np.all(pi > 0)


def test_reducible_chain_rejected():
    spec = CtmcSpec(
        states=(COMPLETE, RING, RING),
        leave_rates=tuple(as_rate_expr(1.0) for _ in range(3)),
        # state 2 is absorbing-ish: 0 and 1 never reach it
        transition_probs=((0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.5, 0.0)),
    )
    with pytest.raises(AnalysisError, match="reducible"):
        stationary_distribution(generator_matrix(spec, 10))


def test_return_moments_two_state_closed_form():
    mean, var = return_time_moments(two_state(1.0, 1.0), 10, 0)
    assert mean == pytest.approx(2.0, abs=1e-9)
    assert var == pytest.approx(2.0, abs=1e-9)
    mean, var = return_time_moments(two_state(2.0, 4.0), 10, 0)
    assert mean == pytest.approx(0.75, abs=1e-9)
    assert var == pytest.approx(1 / 4 + 1 / 16, abs=1e-9)


def test_return_moments_general_two_state_mean(rng):
    for _ in range(5):
        q1, q2 = rng.uniform(0.2, 5.0, size=2)
        mean, _ = return_time_moments(two_state(float(q1), float(q2)), 10, 0)
        assert mean == pytest.approx(1 / q1 + 1 / q2, rel=1e-12)


def test_return_moments_match_monte_carlo(rng):
    for k in (3, 4, 6):
        spec = random_irreducible_chain(rng, k)
        target = int(rng.integers(0, k))
        mean, var = return_time_moments(spec, 100, target)
        samples = sample_return_intervals(spec, 100, target, rng, 100_000)
        assert samples.mean() == pytest.approx(mean, rel=0.02)
        assert samples.var(ddof=1) == pytest.approx(var, rel=0.05)


def test_trajectory_single_state():
    rng = np.random.default_rng(0)
    assert sample_trajectory(single_state(), 5, rng, 100.0) == [(0, 0.0)]


def test_trajectory_holding_time_and_occupancy(rng):
    spec = two_state(1.0, 2.0)
    traj = sample_trajectory(spec, 10, rng, 1.0e4)
    holds = np.diff([t for _, t in traj])
    states = np.array([s for s, _ in traj])[:-1]
    mean_hold_0 = holds[states == 0].mean()
    assert mean_hold_0 == pytest.approx(1.0, rel=0.03)
    occ = empirical_occupancy(traj, 2, 1.0e4)
    assert occ == pytest.approx([2 / 3, 1 / 3], abs=0.02)


def test_analyze_bundles_everything():
    a = analyze(two_state(1.0, 1.0), 10)
    assert a.generator.shape == (2, 2)
    assert a.stationary == pytest.approx([0.5, 0.5])
    assert a.return_means == pytest.approx([2.0, 2.0])
    assert a.return_variances == pytest.approx([2.0, 2.0])
