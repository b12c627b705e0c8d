from decimal import Decimal

import numpy as np
import pytest

from liqspec import Basis, Level, RateProfile, TickSeries, accumulate, generate, make_basis, solve
from liqspec.synth import random_walk_profile, two_level_profile

EIGHT_PRICES = ["690.50", "692.10", "694.00", "695.75", "697.20", "698.40", "700.00", "703.30"]
EIGHT_RATES = [50, 120, 400, 80, 30, 60, 350, 20]


def rel_err(a, b) -> float:
    """Max-norm error of ``a`` relative to the max-norm of ``b``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def series_from_arrays(t_ns, prices, v, **kw) -> TickSeries:
    prices = [Decimal(str(p)) for p in prices]
    scale = max(0, max(-p.as_tuple().exponent for p in prices))
    units = [int(p.scaleb(scale)) for p in prices]
    return TickSeries(t=t_ns, price_units=units, price_scale=scale, v=v, **kw)


def eight_level_profile(repeats: int = 25, jitter: bool = True, seed: int = 11) -> RateProfile:
    levels = [
        Level(p, r, 500.0, 1.0, r)
        for _ in range(repeats)
        for p, r in zip(EIGHT_PRICES, EIGHT_RATES)
    ]
    return RateProfile(tuple(levels), seed=seed, jitter=jitter)


def wide_price_profile(n_levels: int = 200, seed: int = 5) -> RateProfile:
    """Prices spread over [1, 5], where even a monomial basis stays usable at d=4."""
    rng = np.random.default_rng(seed)
    levels = []
    for _ in range(n_levels):
        price = Decimal(int(rng.integers(100, 500))) / 100
        size = int(rng.integers(1, 500))
        spacing = float(rng.choice([0.01, 0.1, 1.0]))
        levels.append(Level(price, size / spacing, spacing * 50, spacing, size))
    return RateProfile(tuple(levels), seed=seed, jitter=True)


@pytest.fixture(scope="session")
def two_level():
    return generate(two_level_profile())


@pytest.fixture(scope="session")
def eight_level():
    return generate(eight_level_profile())


@pytest.fixture(scope="session")
def walk_series():
    return generate(random_walk_profile(200, seed=7, trades_per_level=50))


@pytest.fixture(scope="session")
def walk_solved(walk_series):
    basis = make_basis(6, walk_series)
    gram = accumulate(walk_series, basis)
    return walk_series, basis, gram, solve(gram)


@pytest.fixture
def constant_price():
    """Every trade at 700.00, with a basis window wider than the data."""
    t = 34_200_000_000_000 + np.arange(50) * 500_000_000
    v = np.cumsum(np.full(50, 30))
    series = series_from_arrays(t, ["700.00"] * 50, v)
    return series, Basis(3, "chebyshev", Decimal("690"), Decimal("710"))


def elem_rel(a, b) -> float:
    """Largest elementwise relative error of ``a`` against ``b``."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
