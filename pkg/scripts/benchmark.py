#!/usr/bin/env python3
"""Time ingest + analysis on a large synthetic tick file through the CLI."""

import argparse
import tempfile
import time
from pathlib import Path

from liqspec import generate, write_ticks
from liqspec.cli import main as cli_main
from liqspec.synth import random_walk_profile


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=3_000_000)
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    per_level = 50
    series = generate(random_walk_profile(max(1, args.ticks // per_level), seed=args.seed,
                                          trades_per_level=per_level))
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "ticks.csv"
        with open(path, "w") as fh:
            write_ticks(series, fh)
        start = time.perf_counter()
        rc = cli_main(["analyze", str(path), "--full-day", "--d", str(args.d), "--out-dir", tmp])
        elapsed = time.perf_counter() - start
    print(f"ticks={len(series)} d={args.d} exit={rc} seconds={elapsed:.2f}")


if __name__ == "__main__":
    main()
