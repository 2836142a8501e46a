"""Topology-switching CTMC: generator, stationary law, return-time moments.

States are topologies; the chain leaves state i at rate q_i and jumps to j
with probability p_ij. Return intervals to a target state (entry to next
entry) are phase-type distributed; their moments come from the absorbing
chain obtained by splitting the target into a start copy and an absorbing
copy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AnalysisError, ConfigurationError
from .rate_expr import RateExpr, as_rate_expr
from .topology import TopologySpec

_ROW_SUM_TOL = 1e-12
_STATIONARY_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CtmcSpec:
    """K-state switching chain over a fixed list of topologies.

    ``leave_rates`` may depend on n through rate expressions; they are
    evaluated once per run, so the chain is time-homogeneous within a run.
    ``transition_probs`` is a K x K row-stochastic matrix with zero diagonal
    (ignored for K = 1, where switching is disabled).
    """

    states: tuple[TopologySpec, ...]
    leave_rates: tuple[RateExpr, ...]
    transition_probs: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.states)
        if k < 1:
            raise ConfigurationError("CTMC needs at least one state")
        if len(self.leave_rates) != k:
            raise ConfigurationError(
                f"{len(self.leave_rates)} leave rates for {k} states"
            )
        if k == 1:
            return
        p = np.asarray(self.transition_probs, dtype=float)
        if p.shape != (k, k):
            raise ConfigurationError(f"transition matrix must be {k}x{k}, got {p.shape}")
        if np.any(np.diag(p) != 0.0):
            raise ConfigurationError("transition matrix must have zero diagonal")
        if np.any(p < 0):
            raise ConfigurationError("transition probabilities must be nonnegative")
        rows = p.sum(axis=1)
        bad = np.where(np.abs(rows - 1.0) > _ROW_SUM_TOL)[0]
        if bad.size:
            raise ConfigurationError(
                f"transition matrix rows {bad.tolist()} do not sum to 1 (sums {rows[bad].tolist()})"
            )

    @property
    def K(self) -> int:
        return len(self.states)

    def q_at(self, n: int) -> np.ndarray:
        """Evaluate all leave rates at n (positive by RateExpr contract)."""
        return np.array([r.at(n) for r in self.leave_rates], dtype=float)

    @staticmethod
    def from_dict(d: dict) -> "CtmcSpec":
        try:
            states = tuple(TopologySpec.from_dict(s) for s in d["states"])
            q = tuple(as_rate_expr(r) for r in d["q"])
        except KeyError as e:
            raise ConfigurationError(f"ctmc section missing key {e}") from e
        k = len(states)
        p_raw = d.get("p")
        if p_raw is None:
            if k == 1:
                p_raw = [[0.0]]
            elif k == 2:
                p_raw = [[0.0, 1.0], [1.0, 0.0]]
            else:
                raise ConfigurationError("ctmc section needs a 'p' matrix for K >= 3")
        p = tuple(tuple(float(x) for x in row) for row in p_raw)
        return CtmcSpec(states=states, leave_rates=q, transition_probs=p)

    def to_dict(self) -> dict:
        return {
            "states": [s.to_dict() for s in self.states],
            "q": [str(r) for r in self.leave_rates],
            "p": [list(row) for row in self.transition_probs],
        }


@dataclass(frozen=True)
class CtmcAnalysis:
    """Derived quantities at a fixed n."""

    generator: np.ndarray
    stationary: np.ndarray
    return_means: np.ndarray
    return_variances: np.ndarray


def generator_matrix(spec: CtmcSpec, n: int) -> np.ndarray:
    """Q_ij = q_i p_ij off-diagonal, Q_ii = -q_i; rows sum to zero exactly."""
    k = spec.K
    if k == 1:
        return np.zeros((1, 1))
    q = spec.q_at(n)
    p = np.asarray(spec.transition_probs, dtype=float)
    Q = q[:, None] * p
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return Q


def _check_irreducible(Q: np.ndarray) -> None:
    k = Q.shape[0]
    if k == 1:
        return
    mask = (Q > 0).astype(np.int8)
    np.fill_diagonal(mask, 0)
    ncomp, labels = connected_components(csr_matrix(mask), directed=True, connection="strong")
    if ncomp > 1:
        groups = [np.where(labels == c)[0].tolist() for c in range(ncomp)]
        raise AnalysisError(
            f"CTMC is reducible: states split into strongly connected groups {groups}"
        )


def stationary_distribution(Q: np.ndarray) -> np.ndarray:
    """Solve pi Q = 0, sum(pi) = 1 by dense least squares; checks the residual."""
    Q = np.asarray(Q, dtype=float)
    k = Q.shape[0]
    if k == 1:
        return np.ones(1)
    _check_irreducible(Q)
    A = np.vstack([Q.T, np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = np.max(np.abs(pi @ Q))
    if residual > _STATIONARY_RESIDUAL_TOL or np.any(pi <= 0):
        raise AnalysisError(
            f"stationary solve failed: residual {residual:.3e}, pi={pi.tolist()}"
        )
    return pi / pi.sum()


def return_time_moments(spec: CtmcSpec, n: int, target_state: int) -> tuple[float, float]:
    """Mean and variance of the entry-to-next-entry interval of ``target_state``.

    Splits the target into a start copy (transient) and an absorbing copy:
    the transient sub-generator S equals Q with the target column zeroed off
    the diagonal, so jumps into the target absorb. With alpha the indicator
    of the start copy, mean = -alpha S^-1 1 and
    variance = 2 alpha S^-2 1 - mean^2.
    """
    k = spec.K
    if k < 2:
        raise AnalysisError("return times need at least two CTMC states")
    if not (0 <= target_state < k):
        raise ConfigurationError(f"target state {target_state} outside 0..{k - 1}")
    Q = generator_matrix(spec, n)
    _check_irreducible(Q)
    S = Q.copy()
    S[:, target_state] = 0.0
    S[target_state, target_state] = Q[target_state, target_state]
    alpha = np.zeros(k)
    alpha[target_state] = 1.0
    ones = np.ones(k)
    try:
        x1 = np.linalg.solve(S, ones)        # S^-1 1
        x2 = np.linalg.solve(S, x1)          # S^-2 1
    except np.linalg.LinAlgError as e:
        raise AnalysisError(f"transient sub-generator is singular: {e}") from e
    mean = -float(alpha @ x1)
    variance = 2.0 * float(alpha @ x2) - mean * mean
    return mean, variance


def analyze(spec: CtmcSpec, n: int) -> CtmcAnalysis:
    """Generator, stationary distribution, and per-state return moments."""
    Q = generator_matrix(spec, n)
    pi = stationary_distribution(Q)
    if spec.K >= 2:
        moments = [return_time_moments(spec, n, s) for s in range(spec.K)]
        means = np.array([m for m, _ in moments])
        variances = np.array([v for _, v in moments])
    else:
        means = np.full(1, np.nan)
        variances = np.full(1, np.nan)
    return CtmcAnalysis(
        generator=Q, stationary=pi, return_means=means, return_variances=variances
    )


def sample_trajectory(
    spec: CtmcSpec, n: int, rng: np.random.Generator, horizon: float
) -> list[tuple[int, float]]:
    """Sample (state, entry_time) segments covering [0, horizon].

    The initial state is drawn from the stationary distribution; holding
    times are Exponential(q_i); jumps follow the transition matrix.
    """
    if horizon <= 0:
        raise ConfigurationError(f"horizon must be > 0, got {horizon}")
    if spec.K == 1:
        return [(0, 0.0)]
    Q = generator_matrix(spec, n)
    pi = stationary_distribution(Q)
    q = spec.q_at(n)
    p = np.asarray(spec.transition_probs, dtype=float)
    p_cum = np.cumsum(p, axis=1)
    state = int(np.searchsorted(np.cumsum(pi), rng.random()))
    t = 0.0
    out = [(state, 0.0)]
    while True:
        t += rng.exponential(1.0 / q[state])
        if t >= horizon:
            return out
        state = int(np.searchsorted(p_cum[state], rng.random()))
        out.append((state, t))


def empirical_occupancy(
    trajectory: list[tuple[int, float]], K: int, horizon: float
) -> np.ndarray:
    """Fraction of [0, horizon] spent in each state."""
    occ = np.zeros(K)
    for idx, (state, start) in enumerate(trajectory):
        end = trajectory[idx + 1][1] if idx + 1 < len(trajectory) else horizon
        occ[state] += end - start
    return occ / horizon


def sample_return_intervals(
    spec: CtmcSpec, n: int, target_state: int, rng: np.random.Generator, count: int
) -> np.ndarray:
    """Monte-Carlo entry-to-next-entry intervals of ``target_state``.

    Starts at an entry into the target and records ``count`` consecutive
    renewal intervals.
    """
    if spec.K < 2:
        raise AnalysisError("return intervals need at least two CTMC states")
    q = spec.q_at(n)
    p_cum = np.cumsum(np.asarray(spec.transition_probs, dtype=float), axis=1)
    intervals = np.empty(count)
    state = target_state
    interval = 0.0
    filled = 0
    # draw in batches; refill as needed
    while filled < count:
        holds = rng.exponential(1.0, size=4096)
        jumps = rng.random(size=4096)
        for h, u in zip(holds, jumps):
            interval += h / q[state]
            state = int(np.searchsorted(p_cum[state], u))
            if state == target_state:
                intervals[filled] = interval
                interval = 0.0
                filled += 1
                if filled == count:
                    break
    return intervals
