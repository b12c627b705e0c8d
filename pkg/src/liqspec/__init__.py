"""Matching-rate equilibrium analysis of executed-trade tick data."""

from liqspec.analytics import (
    EquilibriumReport,
    ImpactAnalysis,
    LocalizedState,
    analyze,
    equilibrium_price,
    impact_extremum,
    localized_state,
    projection_probability,
    rate_at_price,
    scan_curves,
    volume_histogram,
)
from liqspec.basis import Basis, evaluate, make_basis
from liqspec.ingest import IngestError, Tick, TickSeries, parse_ticks, read_ticks, write_ticks
from liqspec.measures import GramPair, MeasureError, accumulate, weighted_moment
from liqspec.spectrum import Spectrum, SpectrumError, State, rayleigh, solve, variation_checks
from liqspec.synth import Level, RateProfile, generate

__all__ = [
    "Basis",
    "EquilibriumReport",
    "GramPair",
    "ImpactAnalysis",
    "IngestError",
    "Level",
    "LocalizedState",
    "MeasureError",
    "RateProfile",
    "Spectrum",
    "SpectrumError",
    "State",
    "Tick",
    "TickSeries",
    "accumulate",
    "analyze",
    "equilibrium_price",
    "evaluate",
    "generate",
    "impact_extremum",
    "localized_state",
    "make_basis",
    "parse_ticks",
    "projection_probability",
    "rate_at_price",
    "rayleigh",
    "read_ticks",
    "scan_curves",
    "solve",
    "variation_checks",
    "volume_histogram",
    "weighted_moment",
    "write_ticks",
]
