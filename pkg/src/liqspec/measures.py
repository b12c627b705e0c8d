"""Time- and volume-weighted Gram matrices of a basis over a tick stream.

For ticks q = 1..n (tick 0 is only the differencing baseline)::

    Gt[j, k] = sum_q dt_q Q_j(p_q) Q_k(p_q)      (seconds)
    Gv[j, k] = sum_q dv_q Q_j(p_q) Q_k(p_q)      (shares)

The same sums with an extra factor x_q (the basis variable of p_q) are kept
as ``Xt``/``Xv``; price-weighted moments such as <Q_j p Q_k>_v follow from
them without re-reading the ticks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from liqspec.basis import Basis
from liqspec.ingest import TickSeries
from liqspec.linalg import CompensatedSum

CHUNK_SIZE = 1 << 16
THREADS_ENV = "LIQSPEC_THREADS"


class MeasureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GramPair:
    Gt: np.ndarray
    Gv: np.ndarray
    Xt: np.ndarray
    Xv: np.ndarray
    total_time: float
    total_volume: float
    basis: Basis

    @property
    def d(self) -> int:
        return self.basis.d

    def __add__(self, other: "GramPair") -> "GramPair":
        if not isinstance(other, GramPair):
            return NotImplemented
        if other.basis != self.basis:
            raise MeasureError("cannot add Gram matrices built on different bases")
        return GramPair(
            Gt=self.Gt + other.Gt,
            Gv=self.Gv + other.Gv,
            Xt=self.Xt + other.Xt,
            Xv=self.Xv + other.Xv,
            total_time=self.total_time + other.total_time,
            total_volume=self.total_volume + other.total_volume,
            basis=self.basis,
        )

    def price_moment(self, weight: str) -> np.ndarray:
        """<Q_j p Q_k> under the time (``"t"``) or volume (``"v"``) measure."""
        g, x = (self.Gt, self.Xt) if weight == "t" else (self.Gv, self.Xv)
        return self.basis.center * g + self.basis.half_width * x

    def scaled(self, time_factor: float = 1.0, volume_factor: float = 1.0) -> "GramPair":
        return GramPair(
            Gt=self.Gt * time_factor,
            Gv=self.Gv * volume_factor,
            Xt=self.Xt * time_factor,
            Xv=self.Xv * volume_factor,
            total_time=self.total_time * time_factor,
            total_volume=self.total_volume * volume_factor,
            basis=self.basis,
        )


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _chunk_moments(basis: Basis, x: np.ndarray, dt: np.ndarray, dv: np.ndarray) -> np.ndarray:
    q = basis.evaluate_unit(x)
    out = np.empty((4, basis.d, basis.d))
    for i, w in enumerate((dt, dv, dt * x, dv * x)):
        out[i] = (q * w[:, None]).T @ q
    return out


def accumulate(
    series: TickSeries,
    basis: Basis,
    threads: int | None = None,
    chunk_size: int = CHUNK_SIZE,
) -> GramPair:
    """Build the Gram matrices of ``basis`` over ``series``.

    Chunks of ``chunk_size`` increments are reduced with BLAS and merged in
    chunk order with compensated summation, so the result depends neither on
    the thread count nor on tick count beyond a few ulps.
    """
    if len(series) < 2:
        raise MeasureError("at least two ticks are needed")
    total_time = series.total_time
    if total_time == 0:
        raise MeasureError("time measure is null")
    x = basis.series_to_unit(series)[1:]
    dt = series.dt
    dv = series.dv.astype(float)
    bounds = [(a, min(a + chunk_size, len(x))) for a in range(0, len(x), chunk_size)]

    def work(span):
        a, b = span
        return _chunk_moments(basis, x[a:b], dt[a:b], dv[a:b])

    n_threads = thread_count() if threads is None else max(1, threads)
    acc = CompensatedSum((4, basis.d, basis.d))
    if n_threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            for part in pool.map(work, bounds):
                acc.add(part)
    else:
        for span in bounds:
            acc.add(work(span))
    m = acc.value
    m = 0.5 * (m + np.swapaxes(m, 1, 2))
    return GramPair(
        Gt=m[0],
        Gv=m[1],
        Xt=m[2],
        Xv=m[3],
        total_time=total_time,
        total_volume=float(series.total_volume),
        basis=basis,
    )


def weighted_moment(series: TickSeries, weight: str, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """<f>_t or <f>_v: the sum over ticks after the first of dt (or dv) times f(p).

    ``f`` receives the array of trade prices (floats) of those ticks.
    """
    if weight == "t":
        w = series.dt
    elif weight == "v":
        w = series.dv.astype(float)
    else:
        raise ValueError(f"weight must be 't' or 'v', got {weight!r}")
    values = np.broadcast_to(np.asarray(f(series.prices[1:]), dtype=float), w.shape)
    return math.fsum(w * values)


def write_gram_csv(gram: GramPair, stream: TextIO) -> None:
    b = gram.basis
    stream.write(
        f"# d={b.d},basis={b.family},p_lo={b.p_lo},p_hi={b.p_hi},"
        f"total_time={gram.total_time:.17g},total_volume={gram.total_volume:.17g}\n"
    )
    stream.write("matrix,row," + ",".join(f"c{k}" for k in range(b.d)) + "\n")
    for name, m in (("Gt", gram.Gt), ("Gv", gram.Gv)):
        for j, row in enumerate(m):
            stream.write(f"{name},{j}," + ",".join(f"{v:.17g}" for v in row) + "\n")
