"""Script entry point: render plots from sparsecp output files."""

from __future__ import annotations

import argparse
import sys

from .phase_plot import MalformedInput as PhaseMalformed
from .phase_plot import plot_phase_diagram
from .ratio_plot import MalformedInput as RatioMalformed
from .ratio_plot import plot_ratio_convergence


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecp-plot",
        description="Render figures from sparsecp CSV/JSON outputs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-diagram", help="shaded regions with curves")
    p.add_argument("--grid", required=True, help="region grid CSV")
    p.add_argument("--curves", required=True, help="curves CSV")
    p.add_argument("--out", required=True,
                   help="output image path (PNG and SVG are written)")

    p = sub.add_parser("ratio-convergence",
                       help="MC ratios with CIs against the limit law")
    p.add_argument("--mc", nargs="*", default=[], help="mc JSON files")
    p.add_argument("--limits", required=True, help="limits JSON file")
    p.add_argument("--out", required=True,
                   help="output image path (PNG and SVG are written)")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "phase-diagram":
            png, svg = plot_phase_diagram(args.grid, args.curves, args.out)
        else:
            png, svg = plot_ratio_convergence(args.mc, args.limits, args.out)
    except (PhaseMalformed, RatioMalformed) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
