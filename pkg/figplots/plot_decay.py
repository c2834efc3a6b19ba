#!/usr/bin/env python3
"""Log sup-norm against time with the fitted decay slope annotated.

Usage: plot_decay.py IN.csv OUT.png [--window T0 T1]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from figlib import PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", type=Path, help="time-series CSV")
    parser.add_argument("output", type=Path, help="image file to write")
    parser.add_argument("--window", nargs=2, type=float, default=None, metavar=("T0", "T1"))
    args = parser.parse_args(argv)
    window = tuple(args.window) if args.window else None
    try:
        info = render(PlotJob((args.input,), "decay", args.output, window=window))
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output} (rate = {info['rate']:.6g})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
