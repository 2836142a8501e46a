"""Reproducible scenario presets and the sweep driver.

The four presets mirror the simulation campaigns the toolkit targets:
two-state ring/grid switching, two-state ring/fully-connected switching,
the four-state cycle including the disconnected topology, and the
constant-rate chain containing the fully connected state used for the
logarithmic-scaling property check.

Rate classes in the fig presets name the growth of the mean dwell time per
CTMC state (leave rate = 1 / expression). This is what makes the rate class
visible in the age curves: a dwell time growing like sqrt(n) leaves the
network stuck in its worst topology long enough for the age to climb to
that topology's level, whereas scaling the leave rate itself up with n only
switches faster, blending the topologies so the best one dominates and
every variant collapses onto the same logarithmic curve.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .ctmc import CtmcSpec
from .engine import SimConfig, SimMode, derive_seed, run
from .errors import ConfigurationError
from .metrics import SweepRow, SweepTable, aggregate
from .rate_expr import RateExpr, as_rate_expr, parse_holding_time_expr
from .topology import TopologyKind, TopologySpec

DEFAULT_HORIZON = 2.0e3
DEFAULT_BURN_IN_FRACTION = 0.1
DEFAULT_REPLICATES = 20

# squares of the even integers 10..32
EVEN_SQUARES_100_1024 = tuple(k * k for k in range(10, 34, 2))

_RING = TopologySpec(kind=TopologyKind.RING)
_GRID = TopologySpec(kind=TopologyKind.GRID)
_COMPLETE = TopologySpec(kind=TopologyKind.COMPLETE)
_DISCONNECTED = TopologySpec(kind=TopologyKind.DISCONNECTED)


@dataclass(frozen=True)
class ScenarioPreset:
    """One sweep campaign: topologies x rate variants x n values."""

    id: str
    description: str
    n_list: tuple[int, ...]
    states: tuple[TopologySpec, ...]
    transition_probs: tuple[tuple[float, ...], ...]
    rate_variants: tuple[RateExpr, ...]
    lam_e: float = 1.0
    lam_s: float = 1.0
    lam: float = 1.0
    replicates: int = DEFAULT_REPLICATES
    horizon: float = DEFAULT_HORIZON
    burn_in: float = DEFAULT_HORIZON * DEFAULT_BURN_IN_FRACTION

    def ctmc_for(self, variant: RateExpr) -> CtmcSpec:
        """Apply the same leave-rate expression to every state."""
        return CtmcSpec(
            states=self.states,
            leave_rates=(variant,) * len(self.states),
            transition_probs=self.transition_probs,
        )


def _swap2() -> tuple[tuple[float, ...], ...]:
    return ((0.0, 1.0), (1.0, 0.0))


def _cycle4() -> tuple[tuple[float, ...], ...]:
    # 4-state cycle, probability 1/2 to each cycle neighbor
    return (
        (0.0, 0.5, 0.0, 0.5),
        (0.5, 0.0, 0.5, 0.0),
        (0.0, 0.5, 0.0, 0.5),
        (0.5, 0.0, 0.5, 0.0),
    )


def preset(preset_id: str) -> ScenarioPreset:
    if preset_id == "fig3":
        return ScenarioPreset(
            id="fig3",
            description="ring <-> grid switching; sqrt(n) and n^(1/3) dwell-time variants",
            n_list=EVEN_SQUARES_100_1024,
            states=(_RING, _GRID),
            transition_probs=_swap2(),
            rate_variants=(
                parse_holding_time_expr("sqrt(n)"),
                parse_holding_time_expr("n^(1/3)"),
            ),
        )
    if preset_id == "fig4":
        return ScenarioPreset(
            id="fig4",
            description="ring <-> complete switching; n, sqrt(n), log(n) dwell-time variants",
            n_list=tuple(range(200, 1001, 200)),
            states=(_RING, _COMPLETE),
            transition_probs=_swap2(),
            rate_variants=(
                parse_holding_time_expr("n"),
                parse_holding_time_expr("sqrt(n)"),
                parse_holding_time_expr("log(n)"),
            ),
            # dwell times reach n = 1000; a longer horizon keeps the time
            # average dominated by equilibrated stretches
            horizon=6.0e3,
            burn_in=6.0e2,
        )
    if preset_id == "fig5":
        return ScenarioPreset(
            id="fig5",
            description=(
                "4-state cycle complete-ring-grid-disconnected, p=1/2 each way; "
                "n, sqrt(n), n^(1/3), log(n) dwell-time variants"
            ),
            n_list=EVEN_SQUARES_100_1024,
            states=(_COMPLETE, _RING, _GRID, _DISCONNECTED),
            transition_probs=_cycle4(),
            rate_variants=(
                parse_holding_time_expr("n"),
                parse_holding_time_expr("sqrt(n)"),
                parse_holding_time_expr("n^(1/3)"),
                parse_holding_time_expr("log(n)"),
            ),
            horizon=6.0e3,
            burn_in=6.0e2,
        )
    if preset_id == "thm1":
        return ScenarioPreset(
            id="thm1",
            description="complete <-> ring with constant unit rates (log-scaling check)",
            n_list=(128, 256, 512, 1024),
            states=(_COMPLETE, _RING),
            transition_probs=_swap2(),
            rate_variants=(as_rate_expr(1.0),),
        )
    raise ConfigurationError(f"unknown preset {preset_id!r}; choose fig3, fig4, fig5 or thm1")


def list_presets() -> list[ScenarioPreset]:
    return [preset(p) for p in ("fig3", "fig4", "fig5", "thm1")]


def _one_run(
    p: ScenarioPreset, variant: RateExpr, n: int, replicate: int, base_seed: int
) -> SweepRow:
    config = SimConfig(
        n=n,
        lam_e=p.lam_e,
        lam_s=p.lam_s,
        lam=p.lam,
        ctmc=p.ctmc_for(variant),
        horizon=p.horizon,
        burn_in=p.burn_in,
        seed=derive_seed(base_seed, p.id, str(variant), n, replicate),
        mode=SimMode.FULL_GOSSIP,
    )
    result = run(config)
    return SweepRow(
        scenario=f"{p.id}:{variant}",
        n=n,
        rate_class=str(variant),
        replicate=replicate,
        metric="network_avg_age",
        value=result.network_avg_age,
    )


def run_preset(p: ScenarioPreset, seed: int = 0, parallelism: int = 1) -> SweepTable:
    """Run every (variant, n, replicate) cell; deterministic given seed.

    Per-run seeds derive from (seed, preset id, variant, n, replicate), so
    the result set is identical for any ``parallelism``; the numba kernels
    release the GIL, so a thread pool gives real speedup.
    """
    jobs = [
        (variant, n, rep)
        for variant in p.rate_variants
        for n in p.n_list
        for rep in range(p.replicates)
    ]
    if parallelism <= 1:
        rows = [_one_run(p, v, n, rep, seed) for v, n, rep in jobs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(lambda j: _one_run(p, *j, seed), jobs))
    return aggregate(rows)


def shrink_preset(
    p: ScenarioPreset,
    n_list: tuple[int, ...] | None = None,
    replicates: int | None = None,
    horizon: float | None = None,
    rate_variants: tuple[RateExpr, ...] | None = None,
) -> ScenarioPreset:
    """Override sweep dimensions (smoke tests, CLI flags)."""
    updates: dict = {}
    if n_list is not None:
        updates["n_list"] = tuple(n_list)
    if replicates is not None:
        updates["replicates"] = replicates
    if horizon is not None:
        updates["horizon"] = horizon
        updates["burn_in"] = horizon * DEFAULT_BURN_IN_FRACTION
    if rate_variants is not None:
        updates["rate_variants"] = tuple(rate_variants)
    return replace(p, **updates)
