"""Generalized eigenproblem Gv psi = lambda Gt psi and the matching-rate functional.

Each eigenpair gives a state psi(p) = sum_k psi_k Q_k(p) whose matching rate
<psi^2>_v / <psi^2>_t equals lambda. The largest lambda (index ``H`` = 0) is
the equilibrium state; the smallest retained one (``L``) the
liquidity-deficit state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from liqspec.linalg import ConvergenceError, jacobi_eigh
from liqspec.measures import GramPair

# Gt directions with eigenvalue at or below REGULARIZATION * max are dropped.
REGULARIZATION = 1e-12
TIE_TOLERANCE = 1e-12

__all__ = [
    "ConvergenceError",
    "Spectrum",
    "SpectrumError",
    "State",
    "VariationReport",
    "rayleigh",
    "rayleigh_gradient",
    "solve",
    "variation_checks",
    "write_spectrum_csv",
]


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class State:
    coeffs: np.ndarray
    norm_t: float


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs sorted by descending rate.

    ``coeffs[:, i]`` is psi^[i], normalised so that <psi^[i] psi^[l]>_t is the
    identity over the retained subspace.
    """

    lambdas: np.ndarray
    coeffs: np.ndarray
    gt_eigenvalues: np.ndarray
    gt_pinv: np.ndarray
    cond_Gt: float

    H = 0

    @property
    def retained(self) -> int:
        return len(self.lambdas)

    @property
    def L(self) -> int:
        return self.retained - 1

    @property
    def d(self) -> int:
        return self.coeffs.shape[0]

    @property
    def lambda_H(self) -> float:
        return float(self.lambdas[self.H])

    @property
    def lambda_L(self) -> float:
        return float(self.lambdas[self.L])

    def psi(self, i: int) -> np.ndarray:
        return self.coeffs[:, i]

    @property
    def pairs(self) -> list[tuple[float, State]]:
        return [(float(lam), State(self.coeffs[:, i], 1.0)) for i, lam in enumerate(self.lambdas)]


def solve(gram: GramPair, regularization: float = REGULARIZATION) -> Spectrum:
    """All eigenpairs of (Gv, Gt) on the well-supported subspace of Gt.

    Gt is diagonalised first; eigen-directions at or below
    ``regularization * max eigenvalue`` are discarded and the remainder
    whitened, which turns the pencil into a standard symmetric problem
    solved again by Jacobi sweeps.

    Raises
    ------
    SpectrumError
        If no direction of Gt survives regularization.
    ConvergenceError
        If a Jacobi diagonalisation does not converge.
    """
    s, u = jacobi_eigh(gram.Gt)
    if not s[0] > 0:
        raise SpectrumError("time measure degenerate")
    keep = s > regularization * s[0]
    if not keep.any():
        raise SpectrumError("time measure degenerate")
    w = u[:, keep] / np.sqrt(s[keep])
    a = w.T @ gram.Gv @ w
    lam, v = jacobi_eigh(0.5 * (a + a.T))
    psi = w @ v

    # Ties (equal rates) are ordered by descending <psi^2 p>_t.
    pt = gram.price_moment("t")
    price = np.einsum("ji,jk,ki->i", psi, pt, psi)
    tol = TIE_TOLERANCE * max(np.max(np.abs(lam)), np.finfo(float).tiny)
    group = np.concatenate([[0], np.cumsum(np.diff(lam) < -tol)])
    order = np.lexsort((-price, group))
    lam, psi = lam[order], psi[:, order]

    big = np.argmax(np.abs(psi), axis=0)
    signs = np.where(psi[big, np.arange(psi.shape[1])] < 0, -1.0, 1.0)
    psi = psi * signs

    s_min = s[-1]
    cond = float(s[0] / s_min) if s_min > 0 else float("inf")
    return Spectrum(
        lambdas=lam,
        coeffs=psi,
        gt_eigenvalues=s,
        gt_pinv=w @ w.T,
        cond_Gt=cond,
    )


def rayleigh(gram: GramPair, coeffs) -> float:
    """Matching rate <psi^2>_v / <psi^2>_t of the state with coefficients ``coeffs``."""
    c = np.asarray(coeffs, dtype=float)
    if not np.any(c):
        raise SpectrumError("state coefficients are all zero")
    den = c @ gram.Gt @ c
    if not den > 0:
        raise SpectrumError("state outside time-measure support")
    return float(c @ gram.Gv @ c / den)


def rayleigh_gradient(gram: GramPair, coeffs, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of :func:`rayleigh` with respect to the coefficients."""
    c = np.asarray(coeffs, dtype=float)
    grad = np.empty_like(c)
    for k in range(len(c)):
        e = np.zeros_like(c)
        e[k] = step
        grad[k] = (rayleigh(gram, c + e) - rayleigh(gram, c - e)) / (2 * step)
    return grad


@dataclass(frozen=True)
class VariationReport:
    gradient_norms: np.ndarray
    second_variations: np.ndarray
    gradient_tolerance: float
    passed: bool


def variation_checks(gram: GramPair, spectrum: Spectrum, step: float = 1e-6) -> VariationReport:
    """Numerical stationarity of every eigenstate and the sign of the second variation at H.

    Gradients are taken at unit Euclidean norm, where the rate's gradient
    scale does not depend on the units of Gt. The second variation at H in
    direction psi^[l] is 2 (<psi_l^2>_v - lambda_H <psi_l^2>_t) / <psi_H^2>_t.
    """
    lam_h = spectrum.lambda_H
    norms = np.empty(spectrum.retained)
    for i in range(spectrum.retained):
        c = spectrum.psi(i)
        norms[i] = np.max(np.abs(rayleigh_gradient(gram, c / np.linalg.norm(c), step)))
    h = spectrum.psi(spectrum.H)
    norm_h = h @ gram.Gt @ h
    second = np.array(
        [
            2.0 * (c @ gram.Gv @ c - lam_h * (c @ gram.Gt @ c)) / norm_h
            for c in spectrum.coeffs.T
        ]
    )
    grad_tol = 1e-6 * abs(lam_h)
    passed = bool(np.all(norms <= grad_tol) and np.all(second <= 1e-9 * abs(lam_h)))
    return VariationReport(norms, second, grad_tol, passed)


def write_spectrum_csv(spectrum: Spectrum, stream: TextIO) -> None:
    stream.write("i,lambda," + ",".join(f"c{k}" for k in range(spectrum.d)) + "\n")
    for i, lam in enumerate(spectrum.lambdas):
        coeffs = ",".join(f"{v:.17g}" for v in spectrum.psi(i))
        stream.write(f"{i},{lam:.17g},{coeffs}\n")
