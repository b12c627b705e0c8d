"""Small dense symmetric linear algebra with deterministic results.

Everything here works on matrices of dimension <= 64, where a cyclic Jacobi
sweep costs next to nothing and gives eigenvectors orthogonal to working
precision regardless of eigenvalue clustering.
"""

from __future__ import annotations

import numpy as np


class ConvergenceError(RuntimeError):
    """Raised when Jacobi sweeps fail to reduce the off-diagonal mass."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(
    a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) array
        Symmetric input. Only its symmetric part is used.
    tol : float
        Sweeps stop once the Frobenius norm of the off-diagonal part is below
        ``tol`` times the Frobenius norm of the whole matrix.
    max_sweeps : int
        Upper bound on full sweeps before :class:`ConvergenceError`.

    Returns
    -------
    w : (n,) array
        Eigenvalues in descending order.
    v : (n, n) array
        Orthonormal eigenvectors, ``v[:, i]`` belongs to ``w[i]``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        return _sorted(np.diag(a).copy(), v)
    if not np.isfinite(scale):
        raise ValueError("matrix has non-finite entries")

    threshold = tol * scale
    for _ in range(max_sweeps):
        if off_diagonal_norm(a) <= threshold:
            return _sorted(np.diag(a).copy(), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.hypot(theta, 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    residual = off_diagonal_norm(a)
    if residual <= threshold:
        return _sorted(np.diag(a).copy(), v)
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps", residual)


def _sorted(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


class CompensatedSum:
    """Running elementwise sum of equally shaped arrays (Neumaier's variant of Kahan).

    The error of the accumulated value stays at a few ulps of the largest
    partial magnitude, independently of how many terms were added.
    """

    def __init__(self, shape: tuple[int, ...]):
        self._sum = np.zeros(shape)
        self._comp = np.zeros(shape)

    def add(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        s = self._sum + x
        big = np.abs(self._sum) >= np.abs(x)
        self._comp += np.where(big, (self._sum - s) + x, (x - s) + self._sum)
        self._sum = s

    @property
    def value(self) -> np.ndarray:
        return self._sum + self._comp
