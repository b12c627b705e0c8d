"""Observables derived from the eigenstates.

* equilibrium price: <psi_H^2 p>_v / <psi_H^2>_v
* dynamic-impact extremum of that price under perturbations psi_H + sum beta_i psi_i
* localized state psi_P built from the reproducing kernel of Gt
* matching rate I(P) and projection probabilities w_i(P) along a price grid
* the plain price-volume histogram, for comparison
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from liqspec.basis import Basis, make_basis
from liqspec.ingest import TickSeries
from liqspec.linalg import jacobi_eigh
from liqspec.measures import GramPair, accumulate
from liqspec.spectrum import Spectrum, SpectrumError, solve

IMPACT_DEGENERACY = 1e12
DEFAULT_GRID = 512
DEFAULT_BIN_WIDTH = Decimal("0.01")


class AnalyticsError(ValueError):
    pass


@dataclass(frozen=True)
class LocalizedState:
    P: float
    coeffs: np.ndarray
    kernel: float


@dataclass(frozen=True)
class ImpactAnalysis:
    """Extremum of the equilibrium price over first-order state perturbations.

    ``kind`` classifies the stationary point from the eigenvalues of the
    perturbation matrix: ``"min"``, ``"max"``, ``"saddle"``, or ``"none"``
    when there is no direction to perturb in (a single retained state).
    """

    p_H: float
    beta: np.ndarray | None
    extremum: float | None
    ls_condition: float
    ls_eigenvalues: np.ndarray
    kind: str
    degenerate: bool


@dataclass(frozen=True)
class Curves:
    P: np.ndarray
    I: np.ndarray
    w_H: np.ndarray
    w_L: np.ndarray
    extrapolated: bool


@dataclass(frozen=True)
class Histogram:
    bin_lo: list[Decimal]
    volume: np.ndarray
    bin_width: Decimal

    @property
    def total(self) -> int:
        return int(self.volume.sum())


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    basis: Basis
    gram: GramPair
    spectrum: Spectrum
    p_H: float
    impact: ImpactAnalysis
    curves: Curves
    histogram: Histogram
    series_summary: dict

    @property
    def lambda_H(self) -> float:
        return self.spectrum.lambda_H

    @property
    def lambda_L(self) -> float:
        return self.spectrum.lambda_L


def _pinv(gram: GramPair, spectrum: Spectrum | None) -> np.ndarray:
    return (spectrum if spectrum is not None else solve(gram)).gt_pinv


def equilibrium_price(gram: GramPair, spectrum: Spectrum) -> float:
    """Volume-measure mean price of the equilibrium density psi_H^2."""
    h = spectrum.psi(spectrum.H)
    den = h @ gram.Gv @ h
    if not den > 0:
        raise AnalyticsError("equilibrium state carries no volume")
    return float(h @ gram.price_moment("v") @ h / den)


def impact_extremum(gram: GramPair, spectrum: Spectrum) -> ImpactAnalysis:
    """Stationary value of the second-order expansion of the equilibrium price.

    With b_i = <psi_H p psi_i>_v and M_il = <psi_i (p - p_H) psi_l>_v over
    i, l != H, the perturbed price is
    p_H + (2 b.beta + beta.M.beta) / lambda_H, stationary at beta = -M^-1 b
    with value p_H - b.M^-1.b / lambda_H. A condition number of M above
    ``IMPACT_DEGENERACY`` is reported as degenerate rather than inverted.
    """
    lam_h = spectrum.lambda_H
    if not lam_h > 0:
        raise AnalyticsError("equilibrium rate must be positive")
    p_h = equilibrium_price(gram, spectrum)
    psi = spectrum.coeffs
    others = [i for i in range(spectrum.retained) if i != spectrum.H]
    if not others:
        return ImpactAnalysis(p_h, np.zeros(0), p_h, 1.0, np.zeros(0), "none", False)

    b = (psi[:, others].T @ gram.price_moment("v") @ psi[:, spectrum.H])
    shifted = (gram.basis.center - p_h) * gram.Gv + gram.basis.half_width * gram.Xv
    m = psi[:, others].T @ shifted @ psi[:, others]
    mu, vecs = jacobi_eigh(0.5 * (m + m.T))
    abs_mu = np.abs(mu)
    cond = float(abs_mu.max() / abs_mu.min()) if abs_mu.min() > 0 else float("inf")
    if np.all(mu > 0):
        kind = "min"
    elif np.all(mu < 0):
        kind = "max"
    else:
        kind = "saddle"
    if not cond <= IMPACT_DEGENERACY:
        return ImpactAnalysis(p_h, None, None, cond, mu, kind, True)
    m_inv_b = vecs @ ((vecs.T @ b) / mu)
    return ImpactAnalysis(
        p_H=p_h,
        beta=-m_inv_b,
        extremum=float(p_h - (b @ m_inv_b) / lam_h),
        ls_condition=cond,
        ls_eigenvalues=mu,
        kind=kind,
        degenerate=False,
    )


def localized_state(
    gram: GramPair, basis: Basis, P: float, spectrum: Spectrum | None = None
) -> LocalizedState:
    """Unit <.>_t-norm state concentrated at price ``P`` via the kernel of Gt."""
    pinv = _pinv(gram, spectrum)
    q = basis(P)
    kernel = float(q @ pinv @ q)
    if not kernel > 0:
        raise AnalyticsError(f"kernel is not positive at P={P}")
    return LocalizedState(float(P), pinv @ q / np.sqrt(kernel), kernel)


def _kernel_rates(gram: GramPair, basis: Basis, prices, spectrum: Spectrum | None):
    pinv = _pinv(gram, spectrum)
    q = basis(np.atleast_1d(np.asarray(prices, dtype=float)))
    kernel = np.einsum("nj,jk,nk->n", q, pinv, q)
    if np.any(kernel <= 0):
        raise AnalyticsError("kernel is not positive on the requested prices")
    sandwich = pinv @ gram.Gv @ pinv
    rate = np.einsum("nj,jk,nk->n", q, sandwich, q) / kernel
    return q, kernel, rate


def rate_at_price(gram: GramPair, basis: Basis, P, spectrum: Spectrum | None = None):
    """Matching rate I(P) of the localized state at ``P``; vectorised over ``P``."""
    _, _, rate = _kernel_rates(gram, basis, P, spectrum)
    return float(rate[0]) if np.ndim(P) == 0 else rate


def projection_probability(spectrum: Spectrum, gram: GramPair, basis: Basis, i: int, P):
    """w_i(P) = psi_i(P)^2 / K(P, P), the overlap of eigenstate ``i`` with psi_P."""
    if not 0 <= i < spectrum.retained:
        raise IndexError(f"state {i} outside retained spectrum of size {spectrum.retained}")
    q, kernel, _ = _kernel_rates(gram, basis, P, spectrum)
    w = (q @ spectrum.psi(i)) ** 2 / kernel
    return float(w[0]) if np.ndim(P) == 0 else w


def default_grid(basis: Basis, size: int = DEFAULT_GRID) -> np.ndarray:
    if size < 1:
        raise ValueError("grid size must be >= 1")
    return np.linspace(float(basis.p_lo), float(basis.p_hi), size)


def scan_curves(
    gram: GramPair,
    basis: Basis,
    spectrum: Spectrum,
    grid=None,
    extrapolate: bool = False,
) -> Curves:
    """I(P), w_H(P), w_L(P) along ``grid`` (default: 512 points over the price window)."""
    grid = default_grid(basis) if grid is None else np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty price grid")
    outside = bool(np.any((grid < float(basis.p_lo)) | (grid > float(basis.p_hi))))
    if outside and not extrapolate:
        raise AnalyticsError("grid leaves the observed price window; pass extrapolate=True")
    q, kernel, rate = _kernel_rates(gram, basis, grid, spectrum)
    values = q @ spectrum.coeffs[:, [spectrum.H, spectrum.L]]
    w = values**2 / kernel[:, None]
    return Curves(grid, rate, w[:, 0], w[:, 1], outside)


def volume_histogram(series: TickSeries, bin_width: Decimal = DEFAULT_BIN_WIDTH) -> Histogram:
    """Traded volume per price bin ``[lo, lo + bin_width)``, empty bins included.

    Works on exact decimal prices and integer volumes, so the bins add up to
    ``series.session_volume`` exactly.
    """
    bin_width = Decimal(bin_width)
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    scale = max(series.price_scale, -bin_width.as_tuple().exponent)
    units = series.price_units * 10 ** (scale - series.price_scale)
    width = int(bin_width.scaleb(scale))
    idx = units // width
    lo = int(idx.min())
    volume = np.zeros(int(idx.max()) - lo + 1, dtype=np.int64)
    np.add.at(volume, idx - lo, series.trade_volumes())
    bin_lo = [Decimal((lo + k) * width).scaleb(-scale) for k in range(len(volume))]
    return Histogram(bin_lo, volume, bin_width)


def analyze(
    series: TickSeries,
    d: int = 10,
    family: str = "chebyshev",
    grid_size: int = DEFAULT_GRID,
    bin_width: Decimal = DEFAULT_BIN_WIDTH,
    threads: int | None = None,
) -> EquilibriumReport:
    """Full pipeline: basis, Gram matrices, spectrum and every observable."""
    basis = make_basis(d, series, family)
    gram = accumulate(series, basis, threads=threads)
    spectrum = solve(gram)
    impact = impact_extremum(gram, spectrum)
    curves = scan_curves(gram, basis, spectrum, default_grid(basis, grid_size))
    summary = {
        "n_ticks": len(series),
        "session_volume": series.session_volume,
        "dropped_rows": series.dropped_rows,
        "malformed_rows": series.malformed_rows,
    }
    return EquilibriumReport(
        basis=basis,
        gram=gram,
        spectrum=spectrum,
        p_H=impact.p_H,
        impact=impact,
        curves=curves,
        histogram=volume_histogram(series, bin_width),
        series_summary=summary,
    )


__all__ = [
    "AnalyticsError",
    "Curves",
    "EquilibriumReport",
    "Histogram",
    "ImpactAnalysis",
    "LocalizedState",
    "SpectrumError",
    "analyze",
    "default_grid",
    "equilibrium_price",
    "impact_extremum",
    "localized_state",
    "projection_probability",
    "rate_at_price",
    "scan_curves",
    "volume_histogram",
]
