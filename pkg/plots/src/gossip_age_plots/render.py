"""Figure construction and deterministic raster output."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure
from scipy import stats

from .csvio import PlotDataError, read_spread, read_sweep


class ChartKind(str, Enum):
    AGE_VS_N = "age_vs_n"
    SPREAD_HISTOGRAM = "spread_histogram"


@dataclass(frozen=True)
class PlotSpec:
    in_path: str
    out_path: str
    kind: ChartKind
    logx: bool = False
    title: str | None = None


def _group_sweep(points) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per rate class (first-appearance order): sorted n, means, CI half-widths."""
    order: list[str] = []
    by_class: dict[str, dict[int, list[float]]] = {}
    for p in points:
        if p.rate_class not in by_class:
            order.append(p.rate_class)
            by_class[p.rate_class] = {}
        by_class[p.rate_class].setdefault(p.n, []).append(p.value)
    out = {}
    for rc in order:
        ns = np.array(sorted(by_class[rc]))
        means = np.empty(len(ns))
        halves = np.empty(len(ns))
        for i, n in enumerate(ns):
            vals = np.array(by_class[rc][n])
            means[i] = vals.mean()
            if len(vals) > 1:
                halves[i] = stats.t.ppf(0.975, len(vals) - 1) * vals.std(ddof=1) / np.sqrt(len(vals))
            else:
                halves[i] = 0.0
        out[rc] = (ns, means, halves)
    return out


def build_figure(spec: PlotSpec, text: str) -> Figure:
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    if spec.kind == ChartKind.AGE_VS_N:
        groups = _group_sweep(read_sweep(text))
        all_n = {int(n) for ns, _, _ in groups.values() for n in ns}
        if len(all_n) < 2:
            raise PlotDataError("age_vs_n needs at least 2 distinct n values")
        for rc, (ns, means, halves) in groups.items():
            ax.errorbar(ns, means, yerr=halves, marker="o", capsize=3, label=rc)
        ax.set_xlabel("number of nodes n")
        ax.set_ylabel("average version age")
        if spec.logx:
            ax.set_xscale("log")
        ax.legend(title="rate class")
    else:
        times = np.array(read_spread(text))
        ax.hist(times, bins=30, color="tab:blue", alpha=0.8)
        ax.axvline(times.mean(), color="tab:red", linestyle="--",
                   label=f"mean = {times.mean():.2f}")
        ax.set_xlabel("spread time T")
        ax.set_ylabel("trials")
        ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> None:
    """Read the CSV, build the chart, write a raster image.

    Output bytes are reproducible for identical input: the Agg backend is
    forced and the PNG Software metadata chunk is stripped.
    """
    try:
        with open(spec.in_path) as fh:
            text = fh.read()
    except OSError as e:
        raise PlotDataError(f"cannot read {spec.in_path}: {e}") from None
    fig = build_figure(spec, text)
    # strip the Software chunk so identical input gives identical bytes
    kwargs = {"metadata": {"Software": None}} if spec.out_path.endswith(".png") else {}
    fig.savefig(spec.out_path, dpi=120, **kwargs)
