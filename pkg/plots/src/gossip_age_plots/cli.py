"""plot: render gossip-age-sim CSV output to an image file."""

from __future__ import annotations

import argparse
import sys

from .csvio import PlotDataError
from .render import ChartKind, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render age-vs-n curves or spread-time histograms from simulator CSV",
    )
    parser.add_argument("--in", dest="in_path", required=True, help="input CSV")
    parser.add_argument("--out", dest="out_path", required=True, help="output image")
    parser.add_argument(
        "--kind",
        required=True,
        choices=[k.value for k in ChartKind],
    )
    parser.add_argument("--logx", action="store_true", help="logarithmic x axis")
    parser.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        in_path=args.in_path,
        out_path=args.out_path,
        kind=ChartKind(args.kind),
        logx=args.logx,
        title=args.title,
    )
    try:
        render(spec)
    except PlotDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
