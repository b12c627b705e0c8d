"""Synthetic tick series with a known matching rate at every price level.

A profile is a sequence of price levels visited in order. At each level the
market trades ``size`` shares every ``spacing`` seconds for ``dwell``
seconds, so the realized rate there is exactly ``size / spacing = rate``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from liqspec.ingest import NS_PER_SECOND, TickSeries, _decimals_to_units

SESSION_OPEN_NS = (9 * 3600 + 30 * 60) * NS_PER_SECOND


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    price: Decimal
    rate: float
    dwell: float
    spacing: float
    size: int

    def __post_init__(self):
        object.__setattr__(self, "price", Decimal(str(self.price)))
        if not self.price > 0:
            raise ProfileError(f"price must be positive, got {self.price}")
        for name in ("rate", "dwell", "spacing", "size"):
            if not getattr(self, name) > 0:
                raise ProfileError(f"{name} must be positive, got {getattr(self, name)}")
        if int(self.size) != self.size:
            raise ProfileError(f"trade size must be a whole number of shares, got {self.size}")
        if abs(self.rate * self.spacing - self.size) > 1e-9 * self.size:
            raise ProfileError(
                f"rate * spacing must equal size at {self.price}: "
                f"{self.rate} * {self.spacing} != {self.size}"
            )
        if round(self.spacing * NS_PER_SECOND) < 1:
            raise ProfileError("spacing below one nanosecond")


@dataclass(frozen=True)
class RateProfile:
    levels: tuple[Level, ...]
    seed: int = 0
    jitter: bool = False
    start: int = SESSION_OPEN_NS

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ProfileError("profile has no price levels")

    @classmethod
    def from_dict(cls, data: dict) -> "RateProfile":
        try:
            levels = [Level(**lv) for lv in data["levels"]]
        except (KeyError, TypeError) as exc:
            raise ProfileError(f"malformed profile: {exc}") from None
        extra = {k: data[k] for k in ("seed", "jitter", "start") if k in data}
        return cls(levels=tuple(levels), **extra)

    @classmethod
    def from_json(cls, text: str) -> "RateProfile":
        return cls.from_dict(json.loads(text))


def generate(profile: RateProfile) -> TickSeries:
    """Tick series realizing ``profile``; deterministic given the seed.

    Every tick after the first is placed one (possibly jittered) spacing of
    its own level after its predecessor, so each level's increments carry
    exactly its declared rate when jitter is off.
    """
    counts = np.array([max(1, round(lv.dwell / lv.spacing)) for lv in profile.levels])
    level_of = np.repeat(np.arange(len(profile.levels)), counts)
    spacing_ns = np.array([round(lv.spacing * NS_PER_SECOND) for lv in profile.levels])[level_of]
    if profile.jitter:
        rng = np.random.default_rng(profile.seed)
        factor = rng.uniform(0.5, 1.5, size=len(spacing_ns))
        spacing_ns = np.maximum(1, np.rint(spacing_ns * factor)).astype(np.int64)
    if len(level_of) < 2:
        raise ProfileError("profile yields fewer than two ticks")
    t = profile.start + np.concatenate([[0], np.cumsum(spacing_ns[1:])])
    sizes = np.array([int(lv.size) for lv in profile.levels], dtype=np.int64)[level_of]
    units, scale = _decimals_to_units([lv.price for lv in profile.levels])
    return TickSeries(
        t=t,
        price_units=units[level_of],
        price_scale=scale,
        v=np.cumsum(sizes),
    )


def two_level_profile(
    price_a="101.00",
    price_b="99.00",
    rate_a: float = 200.0,
    rate_b: float = 10.0,
    dwell: float = 100.0,
) -> RateProfile:
    """Two price levels a, b traded once per second at the given rates."""
    return RateProfile(
        levels=(
            Level(price_a, rate_a, dwell, 1.0, int(rate_a)),
            Level(price_b, rate_b, dwell, 1.0, int(rate_b)),
        )
    )


def random_walk_profile(
    n_levels: int,
    seed: int = 0,
    start_price: float = 700.0,
    tick_size: float = 0.01,
    step: int = 5,
    trades_per_level: int = 50,
    jitter: bool = True,
    spacings=(0.001, 0.002, 0.005, 0.01),
) -> RateProfile:
    """Many levels along a price random walk, with random rates and sizes."""
    rng = np.random.default_rng(seed)
    moves = rng.integers(-step, step + 1, size=n_levels)
    cents = np.round(start_price / tick_size) + np.cumsum(moves)
    cents = np.maximum(cents, 1)
    levels = []
    for c in cents:
        size = int(rng.integers(1, 500))
        spacing = float(rng.choice(spacings))
        price = Decimal(int(c)) * Decimal(str(tick_size))
        levels.append(Level(price, size / spacing, spacing * trades_per_level, spacing, size))
    return RateProfile(levels=tuple(levels), seed=seed, jitter=jitter)
