"""Report files: ``report.json``, ``curves.csv``, ``histogram.csv``.

Floats are written with 17 significant digits so every value round-trips.
"""

from __future__ import annotations

import json
import math
import re
from typing import TextIO

import numpy as np

from liqspec.analytics import Curves, EquilibriumReport, Histogram

SCHEMA_VERSION = 1
_MARK = "\x00f:"
_MARKED = re.compile(r'"\\u0000f:([^"]*)"')


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _mark_floats(obj):
    if isinstance(obj, dict):
        return {k: _mark_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_mark_floats(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _MARK + fmt(float(obj)) if math.isfinite(obj) else None
    return obj


def dumps(obj) -> str:
    """JSON text with every finite float at 17 significant digits; non-finite becomes null."""
    text = json.dumps(_mark_floats(obj), indent=2)
    return _MARKED.sub(r"\1", text)


def report_dict(report: EquilibriumReport) -> dict:
    impact = report.impact
    spectrum = report.spectrum
    basis = report.basis
    return {
        "schema": SCHEMA_VERSION,
        "basis": {
            "family": basis.family,
            "d": basis.d,
            "p_lo": str(basis.p_lo),
            "p_hi": str(basis.p_hi),
        },
        "lambda_H": report.lambda_H,
        "lambda_L": report.lambda_L,
        "lambdas": spectrum.lambdas,
        "retained": spectrum.retained,
        "p_H": report.p_H,
        "impact": {
            "extremum": impact.extremum,
            "degenerate": impact.degenerate,
            "kind": impact.kind,
            "ls_condition": impact.ls_condition,
            "ls_eigenvalues": impact.ls_eigenvalues,
            "beta": impact.beta,
        },
        "cond_Gt": spectrum.cond_Gt,
        "total_time": report.gram.total_time,
        "total_volume": report.gram.total_volume,
        "curves_extrapolated": report.curves.extrapolated,
        **report.series_summary,
    }


def write_report_json(report: EquilibriumReport, stream: TextIO) -> None:
    stream.write(dumps(report_dict(report)) + "\n")


def write_curves_csv(curves: Curves, stream: TextIO) -> None:
    stream.write("P,I,w_H,w_L\n")
    for row in zip(curves.P, curves.I, curves.w_H, curves.w_L):
        stream.write(",".join(fmt(x) for x in row) + "\n")


def write_histogram_csv(histogram: Histogram, stream: TextIO) -> None:
    stream.write("bin_lo,volume\n")
    stream.writelines(f"{lo},{vol}\n" for lo, vol in zip(histogram.bin_lo, histogram.volume.tolist()))
