"""Command line entry point: smeary-render.

Turns one simulation CSV into one figure file.

Exit codes: 0 success, 2 invalid input or arguments.
"""

from __future__ import annotations

import argparse
import sys

from .loader import RenderInputError
from .renderer import PlotSpec, render


def _parse_dims(text):
    if text is None:
        return None
    try:
        dims = tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise RenderInputError(f"could not parse dimension list {text!r}") from exc
    if not dims:
        raise RenderInputError("dimension list is empty")
    return dims


def _parse_range(text, what):
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 2:
        raise RenderInputError(f"--{what} must look like LOW:HIGH")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise RenderInputError(f"--{what} bounds must be numeric") from exc
    if not lo < hi:
        raise RenderInputError(f"--{what} must satisfy LOW < HIGH")
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smeary-render",
        description="Render a log-log V*n against n figure from a smeary "
        "simulation CSV, one panel per dimension and one series per beta.",
    )
    parser.add_argument("--in", dest="infile", required=True, help="simulation CSV")
    parser.add_argument("--out", dest="outfile", required=True, help="image file")
    parser.add_argument(
        "--dims", default=None, help="comma-separated dimensions to keep"
    )
    parser.add_argument(
        "--no-refs",
        action="store_true",
        help="omit the solid 1/n and dashed n**(-1/3) reference lines",
    )
    parser.add_argument("--xrange", default=None, help="x axis limits LOW:HIGH")
    parser.add_argument("--yrange", default=None, help="y axis limits LOW:HIGH")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        spec = PlotSpec(
            infile=args.infile,
            outfile=args.outfile,
            dims=_parse_dims(args.dims),
            references=not args.no_refs,
            x_range=_parse_range(args.xrange, "xrange"),
            y_range=_parse_range(args.yrange, "yrange"),
        )
        report = render(spec)
    except RenderInputError as exc:
        print(f"smeary-render: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"smeary-render: error: {exc}", file=sys.stderr)
        return 2
    filtered = (
        f", {report.rows_filtered_out} rows filtered out"
        if report.rows_filtered_out
        else ""
    )
    print(
        f"wrote {args.outfile}: {len(report.panels)} panel(s), "
        f"{report.points_plotted} points{filtered}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
