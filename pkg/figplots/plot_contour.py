#!/usr/bin/env python3
"""Contour panel of remaining-population ratio over (habitat fraction, c).

Usage: plot_contour.py IN.csv OUT.png [--log-c]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from figlib import PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", type=Path, help="long-form contour CSV")
    parser.add_argument("output", type=Path, help="image file to write")
    parser.add_argument("--log-c", action="store_true", help="log scale on the c axis")
    args = parser.parse_args(argv)
    try:
        info = render(PlotJob((args.input,), "contour", args.output, log_c=args.log_c))
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output} ({len(info['levels'])} level lines)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
