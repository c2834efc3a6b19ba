#!/usr/bin/env python3
"""Overlay of steady-state profiles u*(x) for several degradation rates.

Usage: plot_profiles.py IN1.csv [IN2.csv ...] OUT.png
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from figlib import PlotJob, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("paths", nargs="+", type=Path, help="steady CSVs then the output image")
    args = parser.parse_args(argv)
    if len(args.paths) < 2:
        print("error: need at least one input CSV and the output path", file=sys.stderr)
        return 2
    inputs, output = tuple(args.paths[:-1]), args.paths[-1]
    try:
        info = render(PlotJob(inputs, "profiles", output))
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {output} ({len(info['labels'])} profiles)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
