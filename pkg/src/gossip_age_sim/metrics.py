"""Aggregation of run results and scaling-law fits across n.

The sweep table is the long-format exchange structure written to CSV
(``scenario,n,rate_class,replicate,metric,value`` under the versioned
header line). Fits operate on per-group means: power laws in log-log
space, logarithmic laws linearly against log n.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .errors import AggregationError, ConfigurationError, FitError

CSV_VERSION_HEADER = "# gossip-age-sim v1"
CSV_COLUMNS = ("scenario", "n", "rate_class", "replicate", "metric", "value")


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    n: int
    rate_class: str
    replicate: int
    metric: str
    value: float


@dataclass(frozen=True)
class GroupStats:
    scenario: str
    n: int
    rate_class: str
    metric: str
    count: int
    mean: float
    sd: float
    ci95_half_width: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise AggregationError("sweep table is empty")

    def groups(self) -> list[GroupStats]:
        """Per-(scenario, n) statistics, deterministically ordered.

        CIs use the t distribution (exact for small replicate counts and
        indistinguishable from normal beyond ~30).
        """
        keyed: dict[tuple[str, str, int], list[SweepRow]] = {}
        for row in self.rows:
            keyed.setdefault((row.scenario, row.rate_class, row.n), []).append(row)
        out = []
        for (scenario, rate_class, n) in sorted(keyed):
            rows = keyed[(scenario, rate_class, n)]
            metrics = {r.metric for r in rows}
            if len(metrics) != 1:
                raise AggregationError(
                    f"group ({scenario!r}, n={n}) mixes metrics {sorted(metrics)}"
                )
            values = np.array([r.value for r in rows])
            count = len(values)
            mean = float(values.mean())
            sd = float(values.std(ddof=1)) if count > 1 else 0.0
            half = float(stats.t.ppf(0.975, count - 1) * sd / math.sqrt(count)) if count > 1 else 0.0
            out.append(
                GroupStats(
                    scenario=scenario,
                    n=n,
                    rate_class=rate_class,
                    metric=next(iter(metrics)),
                    count=count,
                    mean=mean,
                    sd=sd,
                    ci95_half_width=half,
                )
            )
        return out

    def subset(self, scenario: str | None = None, rate_class: str | None = None) -> "SweepTable":
        rows = tuple(
            r
            for r in self.rows
            if (scenario is None or r.scenario == scenario)
            and (rate_class is None or r.rate_class == rate_class)
        )
        return SweepTable(rows=rows)

    def rate_classes(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rows:
            seen.setdefault(r.rate_class)
        return list(seen)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_VERSION_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in sorted(
            self.rows, key=lambda r: (r.scenario, r.rate_class, r.n, r.replicate, r.metric)
        ):
            w.writerow([r.scenario, r.n, r.rate_class, r.replicate, r.metric, repr(r.value)])
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "SweepTable":
        lines = text.splitlines()
        if not lines or lines[0].strip() != CSV_VERSION_HEADER:
            raise ConfigurationError(
                f"missing or unknown CSV version header (expected {CSV_VERSION_HEADER!r})"
            )
        reader = csv.DictReader(lines[1:])
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigurationError(f"sweep CSV missing columns {sorted(missing)}")
        rows = tuple(
            SweepRow(
                scenario=rec["scenario"],
                n=int(rec["n"]),
                rate_class=rec["rate_class"],
                replicate=int(rec["replicate"]),
                metric=rec["metric"],
                value=float(rec["value"]),
            )
            for rec in reader
        )
        return SweepTable(rows=rows)


def aggregate(rows: list[SweepRow]) -> SweepTable:
    """Wrap raw rows; statistics come from ``SweepTable.groups()``."""
    return SweepTable(rows=tuple(rows))


class ScalingModel(str, Enum):
    POWER_LAW = "power_law"       # A = c * n^a
    LOGARITHMIC = "logarithmic"   # A = c * log(n) + b


@dataclass(frozen=True)
class ScalingFit:
    model: ScalingModel
    # power law: (c, a); logarithmic: (c, b)
    params: tuple[float, float]
    r_squared: float
    residuals: tuple[float, ...]

    def predict(self, n: float) -> float:
        if self.model == ScalingModel.POWER_LAW:
            c, a = self.params
            return c * n**a
        c, b = self.params
        return c * math.log(n) + b


def _group_means(table: SweepTable) -> tuple[np.ndarray, np.ndarray]:
    groups = table.groups()
    ns = np.array([g.n for g in groups], dtype=float)
    means = np.array([g.mean for g in groups])
    if len(set(ns)) < 3:
        raise FitError(f"need >= 3 distinct n values, got {sorted(set(ns.astype(int)))}")
    return ns, means


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, np.ndarray]:
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    resid = y - pred
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), float(intercept), r2, resid


def fit_scaling(table: SweepTable, model: ScalingModel) -> ScalingFit:
    ns, means = _group_means(table)
    if model == ScalingModel.POWER_LAW:
        if np.any(means <= 0):
            raise FitError("power-law fit requires positive means")
        slope, intercept, r2, resid = _linear_fit(np.log(ns), np.log(means))
        return ScalingFit(
            model=model,
            params=(math.exp(intercept), slope),
            r_squared=r2,
            residuals=tuple(resid),
        )
    slope, intercept, r2, resid = _linear_fit(np.log(ns), means)
    return ScalingFit(
        model=model, params=(slope, intercept), r_squared=r2, residuals=tuple(resid)
    )


@dataclass(frozen=True)
class ModelComparison:
    power_law: ScalingFit
    logarithmic: ScalingFit
    preferred: ScalingModel
    growth_ratio: float            # mean(n_max) / mean(n_min)
    log_law_prediction: float      # log(n_max) / log(n_min)
    power_law_prediction: float    # (n_max / n_min)^a


def compare_models(table: SweepTable) -> ModelComparison:
    """Fit both models, prefer the higher R2, report growth-ratio evidence."""
    pow_fit = fit_scaling(table, ScalingModel.POWER_LAW)
    log_fit = fit_scaling(table, ScalingModel.LOGARITHMIC)
    ns, means = _group_means(table)
    i_min, i_max = int(np.argmin(ns)), int(np.argmax(ns))
    n_min, n_max = ns[i_min], ns[i_max]
    preferred = (
        ScalingModel.LOGARITHMIC
        if log_fit.r_squared >= pow_fit.r_squared
        else ScalingModel.POWER_LAW
    )
    return ModelComparison(
        power_law=pow_fit,
        logarithmic=log_fit,
        preferred=preferred,
        growth_ratio=float(means[i_max] / means[i_min]),
        log_law_prediction=float(math.log(n_max) / math.log(n_min)),
        power_law_prediction=float((n_max / n_min) ** pow_fit.params[1]),
    )
