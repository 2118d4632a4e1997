"""figgen <figure_id> <csv...> -o <png>"""

from __future__ import annotations

import argparse
import sys

from .render import SUPPORTED_FIGURES, FigureSpec, render
from .schemas import MissingInput, SchemaMismatch


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="figgen",
        description="Render publication-style figure reproductions from "
        "dirac-sink sweep CSVs (pure post-processing, no simulation).",
    )
    ap.add_argument("figure_id", type=int, choices=SUPPORTED_FIGURES,
                    help="figure number to reproduce")
    ap.add_argument("csvs", nargs="+", help="input sweep CSV file(s)")
    ap.add_argument("-o", "--out", required=True, help="output PNG path")
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def dispatch(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=args.figure_id, inputs=tuple(args.csvs), output=args.out,
        dpi=args.dpi,
    )
    try:
        out = render(spec)
    except (SchemaMismatch, MissingInput) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def main() -> None:
    sys.exit(dispatch())
