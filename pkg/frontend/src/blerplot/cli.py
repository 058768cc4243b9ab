"""blerplot command line: render BLER curves from result CSVs."""

from __future__ import annotations

import argparse
import sys

from .plotviz import PlotSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blerplot",
        description="Plot BLER-vs-Es/N0 curves from scheduler sweep CSVs")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="one or more result CSVs (one subplot each)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    parser.add_argument("--label", action="append", default=[],
                        metavar="SCHED=LABEL", help="override a legend label")
    parser.add_argument("--xlim", nargs=2, type=float, metavar=("LO", "HI"))
    parser.add_argument("--ylim", nargs=2, type=float, metavar=("LO", "HI"))
    args = parser.parse_args(argv)

    labels = {}
    for item in args.label:
        if "=" not in item:
            print(f"blerplot: bad --label {item!r} (want SCHED=LABEL)", file=sys.stderr)
            return 1
        k, v = item.split("=", 1)
        labels[k] = v
    try:
        spec = PlotSpec(
            inputs=tuple(args.inputs),
            output=args.out,
            title=args.title,
            labels=labels,
            xlim=tuple(args.xlim) if args.xlim else None,
            ylim=tuple(args.ylim) if args.ylim else None,
        )
        out = render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"blerplot: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
