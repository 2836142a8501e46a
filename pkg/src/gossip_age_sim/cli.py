"""Command-line entry point.

Subcommands: simulate, sweep, spread, ctmc, presets {list, run}.
Exit codes: 0 success, 2 configuration/parse error, 3 runtime guard.
All output is buffered and written once, so parallel workers never
interleave partial rows; fixed seeds give byte-identical output for any
--jobs setting.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import stats

from . import ctmc as ctmc_mod
from . import experiments
from .config import load_config
from .engine import SimConfig, SimMode, derive_seed, run, spread_experiment
from .errors import GossipSimError, RuntimeGuardError
from .metrics import CSV_VERSION_HEADER, SweepRow, aggregate
from .rate_expr import parse_holding_time_expr, parse_rate_expr

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _write_out(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    def default(o):
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.integer, np.floating)):
            return o.item()
        raise TypeError(f"not JSON serializable: {type(o)}")

    return json.dumps(obj, indent=2, default=default) + "\n"


def _with_seed(sim: SimConfig, seed: int | None) -> SimConfig:
    return sim if seed is None else dataclasses.replace(sim, seed=seed)


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set)
    sim = _with_seed(cfg.sim, args.seed)
    result = run(sim)
    payload = {
        "network_avg_age": result.network_avg_age,
        "per_node_avg_age": list(result.per_node_avg_age),
        "event_counts": result.event_counts,
        "n0_final": result.n0_final,
        "seed": sim.seed,
    }
    _write_out(_json_dumps(payload), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set)
    base = _with_seed(cfg.sim, args.seed)
    n_list = [int(x) for x in args.n_list.split(",")] if args.n_list else [base.n]
    rates = (
        [parse_rate_expr(r) for r in args.rates.split(",")]
        if args.rates
        else [None]
    )
    replicates = args.replicates or cfg.replicates

    jobs = []
    for rate in rates:
        rate_class = str(rate) if rate is not None else "config"
        ctmc = (
            dataclasses.replace(base.ctmc, leave_rates=(rate,) * base.ctmc.K)
            if rate is not None
            else base.ctmc
        )
        for n in n_list:
            for rep in range(replicates):
                sim = dataclasses.replace(
                    base,
                    n=n,
                    ctmc=ctmc,
                    seed=derive_seed(base.seed, "sweep", rate_class, n, rep),
                )
                jobs.append((rate_class, n, rep, sim))

    def work(job):
        rate_class, n, rep, sim = job
        return SweepRow(
            scenario=f"sweep:{rate_class}",
            n=n,
            rate_class=rate_class,
            replicate=rep,
            metric="network_avg_age",
            value=run(sim).network_avg_age,
        )

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(work, jobs))
    else:
        rows = [work(j) for j in jobs]
    table = aggregate(rows)
    if args.format == "json":
        _write_out(_json_dumps([dataclasses.asdict(r) for r in table.rows]), args.out)
    else:
        _write_out(table.to_csv(), args.out)
    return EXIT_OK


def cmd_spread(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set)
    base = dataclasses.replace(_with_seed(cfg.sim, args.seed), mode=SimMode.SPREAD)
    sims = [
        dataclasses.replace(base, seed=derive_seed(base.seed, "spread", base.n, trial))
        for trial in range(args.trials)
    ]
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(spread_experiment, sims))
    else:
        outcomes = [spread_experiment(s) for s in sims]
    ts = np.array([t for t, _ in outcomes])
    counts = np.array([c for _, c in outcomes], dtype=float)

    lines = [CSV_VERSION_HEADER, "trial,T,n0_count"]
    for trial, (t, c) in enumerate(outcomes):
        lines.append(f"{trial},{t!r},{c}")
    for label, values in (("T", ts), ("n0_count", counts)):
        mean = values.mean()
        if len(values) > 1:
            half = stats.t.ppf(0.975, len(values) - 1) * values.std(ddof=1) / np.sqrt(len(values))
        else:
            half = 0.0
        lines.append(f"mean_{label},{mean!r},")
        lines.append(f"ci95_half_width_{label},{float(half)!r},")
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_ctmc(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.set)
    spec = cfg.sim.ctmc
    n = cfg.sim.n
    analysis = ctmc_mod.analyze(spec, n)
    payload = {
        "K": spec.K,
        "Q": analysis.generator.tolist(),
        "pi": analysis.stationary.tolist(),
        "return_moments": [
            {"state": k, "mean": analysis.return_means[k], "variance": analysis.return_variances[k]}
            for k in range(spec.K)
        ],
    }
    if args.mc_check and spec.K >= 2:
        rng = np.random.default_rng(np.uint64(args.seed if args.seed is not None else cfg.sim.seed))
        checks = []
        for k in range(spec.K):
            samples = ctmc_mod.sample_return_intervals(spec, n, k, rng, args.mc_returns)
            checks.append(
                {
                    "state": k,
                    "mc_mean": float(samples.mean()),
                    "mc_variance": float(samples.var(ddof=1)),
                    "returns": args.mc_returns,
                }
            )
        payload["mc_check"] = checks
    _write_out(_json_dumps(payload), args.out)
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    if args.presets_cmd == "list":
        payload = [
            {
                "id": p.id,
                "description": p.description,
                "n_list": list(p.n_list),
                "rate_variants": [str(r) for r in p.rate_variants],
                "replicates": p.replicates,
                "horizon": p.horizon,
            }
            for p in experiments.list_presets()
        ]
        _write_out(_json_dumps(payload), args.out)
        return EXIT_OK
    p = experiments.preset(args.id)
    p = experiments.shrink_preset(
        p,
        n_list=tuple(int(x) for x in args.n_list.split(",")) if args.n_list else None,
        replicates=args.replicates,
        horizon=args.horizon,
        rate_variants=(
            # preset rate classes are dwell-time expressions
            tuple(parse_holding_time_expr(r) for r in args.rates.split(","))
            if args.rates
            else None
        ),
    )
    table = experiments.run_preset(p, seed=args.seed or 0, parallelism=args.jobs)
    _write_out(table.to_csv(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossip-age-sim",
        description="Version-age simulator for gossip networks with CTMC-switched topologies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        if config_required:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="K=V",
            help="override a config key by dotted path (repeatable)",
        )

    p_sim = sub.add_parser("simulate", help="single run, JSON result")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="replicated sweep over n and rate classes, CSV")
    add_common(p_sweep)
    p_sweep.add_argument("--n-list", default=None, help="comma-separated n values")
    p_sweep.add_argument("--rates", default=None, help="comma-separated rate expressions")
    p_sweep.add_argument("--replicates", type=int, default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_spread = sub.add_parser("spread", help="first-passage spread trials, CSV")
    add_common(p_spread)
    p_spread.add_argument("--trials", type=int, default=200)
    p_spread.add_argument("--jobs", type=int, default=1)
    p_spread.set_defaults(func=cmd_spread)

    p_ctmc = sub.add_parser("ctmc", help="CTMC analysis (Q, pi, return moments), JSON")
    add_common(p_ctmc)
    p_ctmc.add_argument("--mc-check", action="store_true", help="add Monte-Carlo cross-check")
    p_ctmc.add_argument("--mc-returns", type=int, default=100_000)
    p_ctmc.set_defaults(func=cmd_ctmc)

    p_presets = sub.add_parser("presets", help="list or run scenario presets")
    presets_sub = p_presets.add_subparsers(dest="presets_cmd", required=True)
    p_list = presets_sub.add_parser("list")
    p_list.add_argument("--out", default=None)
    p_list.set_defaults(func=cmd_presets)
    p_run = presets_sub.add_parser("run")
    p_run.add_argument("id", help="fig3 | fig4 | fig5 | thm1")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--n-list", default=None)
    p_run.add_argument("--rates", default=None)
    p_run.add_argument("--replicates", type=int, default=None)
    p_run.add_argument("--horizon", type=float, default=None)
    p_run.set_defaults(func=cmd_presets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RuntimeGuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except GossipSimError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
