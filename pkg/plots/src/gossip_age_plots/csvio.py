"""Readers for the versioned CSV files emitted by the simulator CLI.

Two layouts share the "# gossip-age-sim v1" header line: sweep tables
(scenario,n,rate_class,replicate,metric,value) and spread-trial tables
(trial,T,n0_count followed by mean_*/ci95_* summary rows).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

CSV_VERSION_HEADER = "# gossip-age-sim v1"
SWEEP_COLUMNS = ("scenario", "n", "rate_class", "replicate", "metric", "value")
SPREAD_COLUMNS = ("trial", "T", "n0_count")


class PlotDataError(Exception):
    """Input CSV is missing, malformed, or of an unknown version."""


@dataclass(frozen=True)
class SweepPoint:
    scenario: str
    n: int
    rate_class: str
    replicate: int
    metric: str
    value: float


def _check_header(text: str, expected_columns: tuple[str, ...]) -> list[str]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_VERSION_HEADER:
        raise PlotDataError(
            f"unrecognized CSV: expected version header {CSV_VERSION_HEADER!r} on line 1"
        )
    if len(lines) < 2 or tuple(lines[1].strip().split(",")) != expected_columns:
        raise PlotDataError(
            f"unrecognized CSV: expected columns {','.join(expected_columns)} on line 2"
        )
    return lines[2:]


def read_sweep(text: str) -> list[SweepPoint]:
    body = _check_header(text, SWEEP_COLUMNS)
    points = []
    for row in csv.reader(io.StringIO("\n".join(body))):
        if not row:
            continue
        try:
            points.append(
                SweepPoint(
                    scenario=row[0],
                    n=int(row[1]),
                    rate_class=row[2],
                    replicate=int(row[3]),
                    metric=row[4],
                    value=float(row[5]),
                )
            )
        except (IndexError, ValueError) as e:
            raise PlotDataError(f"bad sweep row {row!r}: {e}") from None
    if not points:
        raise PlotDataError("sweep CSV contains no data rows")
    return points


def read_spread(text: str) -> list[float]:
    """Return the per-trial spread times; summary rows are skipped."""
    body = _check_header(text, SPREAD_COLUMNS)
    times = []
    for row in csv.reader(io.StringIO("\n".join(body))):
        if not row or row[0].startswith(("mean_", "ci95_")):
            continue
        try:
            times.append(float(row[1]))
        except (IndexError, ValueError) as e:
            raise PlotDataError(f"bad spread row {row!r}: {e}") from None
    if not times:
        raise PlotDataError("spread CSV contains no trial rows")
    return times
