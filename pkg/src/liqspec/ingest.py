"""Executed-trade tick files: parsing, validation and serialization.

A tick file holds one matched trade per row: time in integer nanoseconds
since midnight, the trade price as a decimal string, and the cumulative
volume traded so far. Prices are kept exactly as scaled integers
(``price_units / 10**price_scale``) until a basis maps them to floats.
"""

from __future__ import annotations

import csv
import gzip
import io
import os
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterator, TextIO

import numpy as np
import pandas as pd

NS_PER_SECOND = 1_000_000_000
# Above 15 significant digits a float cannot round-trip the decimal string.
_FAST_PATH_MAX_PRICE_CHARS = 16
_MAX_PRICE_SCALE = 9


class IngestError(ValueError):
    """Tick input violates the file format or the tick invariants."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


@dataclass(frozen=True)
class Tick:
    t: int
    p: Decimal
    v: int


def _readonly(a: np.ndarray, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TickSeries:
    """Ordered, validated tick sequence.

    ``volume_base`` is the cumulative volume just before the first tick (the
    last value seen before the session window, or 0). It only matters for the
    volume histogram: measures treat the first tick as a differencing
    baseline and never use its own increment.
    """

    t: np.ndarray
    price_units: np.ndarray
    price_scale: int
    v: np.ndarray
    session_start: int | None = None
    session_end: int | None = None
    volume_base: int = 0
    dropped_rows: int = field(default=0, compare=False)
    malformed_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t", _readonly(self.t, np.int64))
        object.__setattr__(self, "price_units", _readonly(self.price_units, np.int64))
        object.__setattr__(self, "v", _readonly(self.v, np.int64))
        n = len(self.t)
        if not (len(self.price_units) == n == len(self.v)):
            raise IngestError("t, price and v columns differ in length")
        if n < 2:
            raise IngestError(f"at least 2 ticks are required, got {n}")
        if self.price_scale < 0:
            raise IngestError("price_scale must be non-negative")
        if np.any(self.price_units <= 0):
            raise IngestError("prices must be positive", int(np.argmax(self.price_units <= 0)))
        bad = np.flatnonzero(np.diff(self.t) < 0)
        if bad.size:
            raise IngestError("time decreases", int(bad[0]) + 1)
        bad = np.flatnonzero(np.diff(self.v) < 0)
        if bad.size:
            raise IngestError("cumulative volume decreases", int(bad[0]) + 1)
        if self.v[0] < self.volume_base:
            raise IngestError("cumulative volume below its baseline", 0)
        if self.session_start is None:
            object.__setattr__(self, "session_start", int(self.t[0]))
        if self.session_end is None:
            object.__setattr__(self, "session_end", int(self.t[-1]))
        if self.t[0] < self.session_start or self.t[-1] > self.session_end:
            raise IngestError("ticks fall outside [session_start, session_end]")

    @classmethod
    def from_ticks(cls, ticks: list[Tick], **kwargs) -> "TickSeries":
        prices = [Decimal(tk.p) for tk in ticks]
        units, scale = _decimals_to_units(prices)
        return cls(
            t=[tk.t for tk in ticks],
            price_units=units,
            price_scale=scale,
            v=[tk.v for tk in ticks],
            **kwargs,
        )

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i: int) -> Tick:
        return Tick(int(self.t[i]), self.price(i), int(self.v[i]))

    def __iter__(self) -> Iterator[Tick]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TickSeries):
            return NotImplemented
        if len(self) != len(other):
            return False
        scale = max(self.price_scale, other.price_scale)
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.v, other.v)
            and np.array_equal(
                self.price_units * 10 ** (scale - self.price_scale),
                other.price_units * 10 ** (scale - other.price_scale),
            )
        )

    def price(self, i: int) -> Decimal:
        return Decimal(int(self.price_units[i])).scaleb(-self.price_scale)

    @property
    def prices(self) -> np.ndarray:
        return self.price_units / 10.0**self.price_scale

    @property
    def price_min(self) -> Decimal:
        return Decimal(int(self.price_units.min())).scaleb(-self.price_scale)

    @property
    def price_max(self) -> Decimal:
        return Decimal(int(self.price_units.max())).scaleb(-self.price_scale)

    @property
    def dt(self) -> np.ndarray:
        """Seconds elapsed before each tick after the first."""
        return np.diff(self.t) / NS_PER_SECOND

    @property
    def dv(self) -> np.ndarray:
        """Shares traded at each tick after the first."""
        return np.diff(self.v)

    @property
    def total_time(self) -> float:
        return (int(self.t[-1]) - int(self.t[0])) / NS_PER_SECOND

    @property
    def total_volume(self) -> int:
        """Volume seen by the measures (first tick excluded)."""
        return int(self.v[-1] - self.v[0])

    @property
    def session_volume(self) -> int:
        """All shares traded in the window, the first tick's trade included."""
        return int(self.v[-1]) - self.volume_base

    def trade_volumes(self) -> np.ndarray:
        """Per-tick traded volume with the first tick measured against ``volume_base``."""
        return np.diff(self.v, prepend=self.volume_base)

    def slice(self, start: int, stop: int) -> "TickSeries":
        base = self.volume_base if start == 0 else int(self.v[start - 1])
        return TickSeries(
            t=self.t[start:stop],
            price_units=self.price_units[start:stop],
            price_scale=self.price_scale,
            v=self.v[start:stop],
            volume_base=base,
        )

    def split(self, parts: int) -> list["TickSeries"]:
        """Cut into ``parts`` pieces sharing their boundary tick.

        Each piece's first tick is the previous piece's last one, so the
        increments of the pieces partition the increments of the whole.
        """
        n_inc = len(self) - 1
        if not 1 <= parts <= n_inc:
            raise ValueError(f"cannot split {n_inc} increments into {parts} parts")
        edges = np.linspace(0, n_inc, parts + 1).round().astype(int)
        return [self.slice(a, b + 1) for a, b in zip(edges[:-1], edges[1:])]


def _decimals_to_units(prices: list[Decimal]) -> tuple[np.ndarray, int]:
    scale = max(0, max(-p.as_tuple().exponent for p in prices))
    units = [int(p.scaleb(scale)) for p in prices]
    return np.array(units, dtype=np.int64), scale


def _recover_units(prices: np.ndarray) -> tuple[np.ndarray, int] | None:
    """Exact decimal recovery for floats parsed from short decimal strings."""
    for scale in range(_MAX_PRICE_SCALE + 1):
        scaled = prices * 10.0**scale
        units = np.rint(scaled)
        if units.max() >= 1e15:
            return None
        if np.all(np.abs(scaled - units) <= 4e-16 * np.abs(units)):
            return units.astype(np.int64), scale
    return None


def parse_clock(text: str) -> int:
    """``HH:MM`` or ``HH:MM:SS`` to nanoseconds since midnight."""
    parts = text.strip().split(":")
    if not 2 <= len(parts) <= 3:
        raise ValueError(f"expected HH:MM, got {text!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    if not (0 <= h <= 24 and 0 <= m < 60 and 0 <= s < 60):
        raise ValueError(f"clock time out of range: {text!r}")
    return ((h * 60 + m) * 60 + s) * NS_PER_SECOND


def _is_header(line: str, delimiter: str, t_col: int) -> bool:
    fields = next(csv.reader([line], delimiter=delimiter), [])
    if len(fields) <= t_col:
        return False
    try:
        int(fields[t_col])
    except ValueError:
        return any(ch.isalpha() for ch in fields[t_col])
    return False


def parse_ticks(
    source: TextIO | str,
    *,
    t_col: int = 0,
    p_col: int = 1,
    v_col: int = 2,
    delimiter: str = ",",
    session_start: int | None = None,
    session_end: int | None = None,
    lenient: bool = False,
) -> TickSeries:
    """Parse delimiter-separated ``t, p, v`` rows into a :class:`TickSeries`.

    Parameters
    ----------
    source : text stream or str
        File contents. A first row whose time field is not an integer is
        taken as a header.
    session_start, session_end : int, optional
        Inclusive window in nanoseconds since midnight. Rows outside it are
        dropped after the monotonicity checks, and their count is recorded.
    lenient : bool
        Skip and count unparseable rows instead of raising.

    Raises
    ------
    IngestError
        On malformed rows (unless ``lenient``), time or cumulative volume
        going backwards (always fatal), or fewer than two ticks in the window.
    """
    text = source if isinstance(source, str) else source.read()
    first_line = text.split("\n", 1)[0].rstrip("\r")
    header = 1 if first_line and _is_header(first_line, delimiter, t_col) else 0

    parsed = _parse_fast(text, header, t_col, p_col, v_col, delimiter)
    if parsed is None:
        parsed = _parse_slow(text, header, t_col, p_col, v_col, delimiter, lenient)
    t, units, scale, v, rows, malformed = parsed

    bad = np.flatnonzero(np.diff(t) < 0)
    if bad.size:
        raise IngestError("time decreases", int(rows[bad[0] + 1]))
    bad = np.flatnonzero(np.diff(v) < 0)
    if bad.size:
        raise IngestError("cumulative volume decreases", int(rows[bad[0] + 1]))

    keep = np.ones(len(t), dtype=bool)
    if session_start is not None:
        keep &= t >= session_start
    if session_end is not None:
        keep &= t <= session_end
    idx = np.flatnonzero(keep)
    if idx.size < 2:
        raise IngestError(f"need at least 2 ticks in the session window, found {idx.size}")
    # Ticks are time-ordered, so the window is contiguous.
    first = int(idx[0])
    base = int(v[first - 1]) if first > 0 else 0
    return TickSeries(
        t=t[keep],
        price_units=units[keep],
        price_scale=scale,
        v=v[keep],
        session_start=session_start,
        session_end=session_end,
        volume_base=base,
        dropped_rows=int(len(t) - idx.size),
        malformed_rows=malformed,
    )


def _parse_fast(text, header, t_col, p_col, v_col, delimiter):
    """Vectorised parse of clean input; ``None`` defers to the row-by-row parser."""
    if t_col == p_col or t_col == v_col or p_col == v_col:
        raise ValueError("t, p and v columns must be distinct")
    try:
        df = pd.read_csv(
            io.StringIO(text),
            sep=delimiter,
            header=None,
            skiprows=header,
            usecols=[t_col, p_col, v_col],
            dtype={t_col: "int64", p_col: "str", v_col: "int64"},
            engine="c",
            skip_blank_lines=False,
            na_filter=False,
        )
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError, OverflowError):
        return None
    if len(df) == 0:
        return None
    p_str = df[p_col]
    if p_str.str.len().max() > _FAST_PATH_MAX_PRICE_CHARS:
        return None
    try:
        prices = p_str.astype("float64").to_numpy()
    except ValueError:
        return None
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
        return None
    recovered = _recover_units(prices)
    if recovered is None:
        return None
    units, scale = recovered
    if np.any(df[v_col].to_numpy() < 0):
        return None
    rows = np.arange(len(df)) + 1 + header
    return df[t_col].to_numpy(), units, scale, df[v_col].to_numpy(), rows, 0


def _parse_slow(text, header, t_col, p_col, v_col, delimiter, lenient):
    ts, ps, vs, rows = [], [], [], []
    malformed = 0
    need = max(t_col, p_col, v_col) + 1
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    for row_no, fields in enumerate(reader, start=1):
        if row_no <= header or not fields or all(not f.strip() for f in fields):
            continue
        try:
            if len(fields) < need:
                raise IngestError(f"expected at least {need} fields, got {len(fields)}", row_no)
            t = int(fields[t_col])
            v = int(fields[v_col])
            try:
                p = Decimal(fields[p_col].strip())
            except InvalidOperation:
                raise IngestError(f"unparseable price {fields[p_col]!r}", row_no) from None
            if not p.is_finite() or p <= 0:
                raise IngestError(f"price must be a positive number, got {fields[p_col]!r}", row_no)
            if v < 0:
                raise IngestError("negative cumulative volume", row_no)
        except (ValueError, IngestError) as exc:
            if not lenient:
                if isinstance(exc, IngestError):
                    raise
                raise IngestError(str(exc), row_no) from None
            malformed += 1
            continue
        ts.append(t)
        ps.append(p)
        vs.append(v)
        rows.append(row_no)
    if not ts:
        raise IngestError("no tick rows found")
    units, scale = _decimals_to_units(ps)
    return (
        np.array(ts, dtype=np.int64),
        units,
        scale,
        np.array(vs, dtype=np.int64),
        np.array(rows),
        malformed,
    )


def read_ticks(path: str | os.PathLike, **kwargs) -> TickSeries:
    """Open ``path`` (gzip if it ends in ``.gz``) and :func:`parse_ticks` it."""
    path = os.fspath(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", newline="") as fh:
        return parse_ticks(fh, **kwargs)


def write_ticks(series: TickSeries, stream: TextIO, header: bool = False) -> None:
    """Serialize as ``t,p,v`` rows that :func:`parse_ticks` reads back unchanged."""
    if header:
        stream.write("t,p,v\n")
    scale = series.price_scale
    units = series.price_units
    if scale:
        whole, frac = np.divmod(units, 10**scale)
        prices = [f"{w}.{f:0{scale}d}" for w, f in zip(whole.tolist(), frac.tolist())]
    else:
        prices = [str(u) for u in units.tolist()]
    stream.writelines(
        f"{t},{p},{v}\n" for t, p, v in zip(series.t.tolist(), prices, series.v.tolist())
    )
