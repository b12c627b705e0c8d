"""Polynomial price bases Q_0..Q_{d-1}.

The default family is Chebyshev-T in the variable
``x = (2p - p_lo - p_hi) / (p_hi - p_lo)``, which puts the observed price
window on [-1, 1]. The monomial family ``Q_k(p) = p**k`` (identity map) is
kept for comparison; it loses most of its digits beyond ``d = 3`` on
prices far from zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np
from numpy.polynomial import chebyshev

from liqspec.ingest import TickSeries

FAMILIES = ("chebyshev", "monomial")
MAX_DIMENSION = 64


class BasisError(ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    d: int
    family: str
    p_lo: Decimal
    p_hi: Decimal

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIMENSION:
            raise BasisError(f"dimension must be in [1, {MAX_DIMENSION}], got {self.d}")
        if self.family not in FAMILIES:
            raise BasisError(f"unknown basis family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "p_lo", Decimal(self.p_lo))
        object.__setattr__(self, "p_hi", Decimal(self.p_hi))
        if self.p_lo > self.p_hi or (self.d > 1 and self.p_lo == self.p_hi):
            raise BasisError("degenerate price support for requested dimension")

    @property
    def center(self) -> float:
        """Price at x = 0."""
        if self.family == "monomial":
            return 0.0
        return float((self.p_lo + self.p_hi) / 2)

    @property
    def half_width(self) -> float:
        """dp/dx of the affine price map."""
        if self.family == "monomial" or self.p_lo == self.p_hi:
            return 1.0
        return float((self.p_hi - self.p_lo) / 2)

    def to_unit(self, p) -> np.ndarray:
        """Map prices to the basis variable x."""
        p = np.asarray(p, dtype=float)
        if self.family == "monomial":
            return p
        if self.p_lo == self.p_hi:
            return np.zeros_like(p)
        lo, hi = float(self.p_lo), float(self.p_hi)
        return (2.0 * p - lo - hi) / (hi - lo)

    def series_to_unit(self, series: TickSeries) -> np.ndarray:
        """Map a series' exact prices to x with a single rounding."""
        if self.family == "monomial":
            return series.prices
        if self.p_lo == self.p_hi:
            return np.zeros(len(series))
        scale = series.price_scale
        lo = int(self.p_lo.scaleb(scale))
        hi = int(self.p_hi.scaleb(scale))
        if Decimal(lo).scaleb(-scale) != self.p_lo or Decimal(hi).scaleb(-scale) != self.p_hi:
            # Window has finer resolution than the series; go through floats.
            return self.to_unit(series.prices)
        return (2 * series.price_units - lo - hi) / (hi - lo)

    def evaluate_unit(self, x) -> np.ndarray:
        """Values Q_0..Q_{d-1} at basis variable ``x``; shape ``x.shape + (d,)``."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape + (self.d,))
        out[..., 0] = 1.0
        if self.d == 1:
            return out
        out[..., 1] = x
        if self.family == "chebyshev":
            two_x = 2.0 * x
            for k in range(2, self.d):
                out[..., k] = two_x * out[..., k - 1] - out[..., k - 2]
        else:
            for k in range(2, self.d):
                out[..., k] = x * out[..., k - 1]
        return out

    def __call__(self, p) -> np.ndarray:
        return self.evaluate_unit(self.to_unit(p))

    def power_coefficients(self) -> np.ndarray:
        """Row k holds Q_k's coefficients in powers of x, lowest first."""
        c = np.zeros((self.d, self.d))
        for k in range(self.d):
            if self.family == "chebyshev":
                c[k, : k + 1] = chebyshev.cheb2poly(np.eye(k + 1)[k])
            else:
                c[k, k] = 1.0
        return c


def make_basis(d: int, series: TickSeries, family: str = "chebyshev") -> Basis:
    """Basis of dimension ``d`` over the traded price range of ``series``."""
    return Basis(d=d, family=family, p_lo=series.price_min, p_hi=series.price_max)


def evaluate(basis: Basis, p) -> np.ndarray:
    """Q_0(p)..Q_{d-1}(p); vectorised over ``p``."""
    return basis(p)
