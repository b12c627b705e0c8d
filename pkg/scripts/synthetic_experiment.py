#!/usr/bin/env python3
"""Recover a known rate profile from synthetic ticks.

Generates ticks at eight price levels with declared matching rates, runs the
full analysis, and prints the rate I(P) recovered at each level next to the
declared one, plus the equilibrium price and the impact extremum.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import EIGHT_PRICES, EIGHT_RATES, eight_level_profile  # noqa: E402

from liqspec import analyze, generate, rate_at_price  # noqa: E402


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=25)
    parser.add_argument("--no-jitter", action="store_true")
    args = parser.parse_args(argv)

    series = generate(eight_level_profile(repeats=args.repeats, jitter=not args.no_jitter))
    report = analyze(series, d=args.d)
    prices = np.array([float(p) for p in EIGHT_PRICES])
    recovered = rate_at_price(report.gram, report.basis, prices, report.spectrum)

    print(f"ticks={len(series)} d={args.d} retained={report.spectrum.retained}")
    print(f"{'price':>10} {'declared':>12} {'recovered':>12}")
    for p, r, got in zip(EIGHT_PRICES, EIGHT_RATES, recovered):
        print(f"{p:>10} {r:>12.4f} {got:>12.4f}")
    print(f"lambda_H={report.lambda_H:.6g} lambda_L={report.lambda_L:.6g}")
    ex = report.impact.extremum
    print(f"p_H={report.p_H:.4f} Ex={'degenerate' if ex is None else f'{ex:.4f}'} ({report.impact.kind})")


if __name__ == "__main__":
    main()
