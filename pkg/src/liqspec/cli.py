"""Command line front end: ``liqspec analyze | simulate | histogram``.

Exit status: 0 on success, 2 for unreadable or malformed input and usage
errors, 3 when the time measure (or the equilibrium state) is degenerate,
4 when an eigensolver fails to converge. No output file is left behind on
a nonzero exit.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Callable

from liqspec.analytics import AnalyticsError, analyze, volume_histogram
from liqspec.basis import FAMILIES, BasisError
from liqspec.ingest import IngestError, parse_clock, read_ticks, write_ticks
from liqspec.linalg import ConvergenceError
from liqspec.measures import MeasureError, write_gram_csv
from liqspec.output import write_curves_csv, write_histogram_csv, write_report_json
from liqspec.spectrum import SpectrumError, write_spectrum_csv
from liqspec.synth import ProfileError, RateProfile, generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_CONVERGENCE = 4


@dataclass
class RunConfig:
    input: Path
    d: int = 10
    family: str = "chebyshev"
    session_from: str | None = "9:30"
    session_to: str | None = "16:00"
    grid_size: int = 512
    bin_width: Decimal = Decimal("0.01")
    out_dir: Path = Path(".")
    dump_gram: Path | None = None
    dump_spectrum: Path | None = None
    lenient: bool = False
    t_col: int = 0
    p_col: int = 1
    v_col: int = 2
    delimiter: str = ","

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("--d must be >= 1")
        if self.grid_size < 1:
            raise ValueError("--grid-size must be >= 1")


def _commit(files: dict[Path, Callable[[io.StringIO], None]]) -> None:
    """Render every file in memory, then move them into place together."""
    rendered = {}
    for path, writer in files.items():
        buf = io.StringIO()
        writer(buf)
        rendered[Path(path)] = buf.getvalue()
    staged = []
    try:
        for path, text in rendered.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".partial")
            tmp.write_text(text)
            staged.append((tmp, path))
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise


def _load(config: RunConfig):
    return read_ticks(
        config.input,
        t_col=config.t_col,
        p_col=config.p_col,
        v_col=config.v_col,
        delimiter=config.delimiter,
        session_start=parse_clock(config.session_from) if config.session_from else None,
        session_end=parse_clock(config.session_to) if config.session_to else None,
        lenient=config.lenient,
    )


def cmd_analyze(config: RunConfig, out=None) -> int:
    series = _load(config)
    report = analyze(series, d=config.d, family=config.family, grid_size=config.grid_size,
                     bin_width=config.bin_width)
    files = {
        config.out_dir / "report.json": lambda s: write_report_json(report, s),
        config.out_dir / "curves.csv": lambda s: write_curves_csv(report.curves, s),
        config.out_dir / "histogram.csv": lambda s: write_histogram_csv(report.histogram, s),
    }
    if config.dump_gram:
        files[config.dump_gram] = lambda s: write_gram_csv(report.gram, s)
    if config.dump_spectrum:
        files[config.dump_spectrum] = lambda s: write_spectrum_csv(report.spectrum, s)
    _commit(files)

    out = out or sys.stdout
    ex = report.impact.extremum
    print(f"lambda_H = {report.lambda_H:.17g}", file=out)
    print(f"lambda_L = {report.lambda_L:.17g}", file=out)
    print(f"p_H = {report.p_H:.17g}", file=out)
    print(f"Ex = {'degenerate' if ex is None else format(ex, '.17g')}", file=out)
    return EXIT_OK


def cmd_histogram(config: RunConfig, out=None) -> int:
    series = _load(config)
    hist = volume_histogram(series, config.bin_width)
    _commit({config.out_dir / "histogram.csv": lambda s: write_histogram_csv(hist, s)})
    out = out or sys.stdout
    print(f"total_volume = {hist.total}", file=out)
    return EXIT_OK


def cmd_simulate(profile_path: Path, out_path: Path, out=None) -> int:
    profile = RateProfile.from_json(Path(profile_path).read_text())
    series = generate(profile)
    _commit({Path(out_path): lambda s: write_ticks(series, s)})
    out = out or sys.stdout
    print(f"wrote {len(series)} ticks to {out_path}", file=out)
    return EXIT_OK


def _decimal(text: str) -> Decimal:
    try:
        return Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", type=Path, help="tick CSV (t_ns,price,cumulative_volume); .gz accepted")
    p.add_argument("--t-col", type=int, default=0)
    p.add_argument("--p-col", type=int, default=1)
    p.add_argument("--v-col", type=int, default=2)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--from", dest="session_from", default="9:30", help="session start HH:MM")
    p.add_argument("--to", dest="session_to", default="16:00", help="session end HH:MM")
    p.add_argument("--full-day", action="store_true", help="disable the session filter")
    p.add_argument("--lenient", action="store_true", help="skip unparseable rows")
    p.add_argument("--bin-width", type=_decimal, default=Decimal("0.01"))
    p.add_argument("--out-dir", type=Path, default=Path("."))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liqspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="equilibrium state, I(P) curves and impact extremum")
    _add_input_args(a)
    a.add_argument("--d", type=int, default=10, help="basis dimension")
    a.add_argument("--basis", choices=FAMILIES, default="chebyshev")
    a.add_argument("--grid-size", type=int, default=512)
    a.add_argument("--dump-gram", type=Path)
    a.add_argument("--dump-spectrum", type=Path)

    h = sub.add_parser("histogram", help="price-volume histogram only")
    _add_input_args(h)

    s = sub.add_parser("simulate", help="synthetic ticks from a rate profile")
    s.add_argument("--profile", type=Path, required=True, help="RateProfile JSON")
    s.add_argument("--out", type=Path, required=True, help="output tick CSV")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        input=args.input,
        d=getattr(args, "d", 10),
        family=getattr(args, "basis", "chebyshev"),
        session_from=None if args.full_day else args.session_from,
        session_to=None if args.full_day else args.session_to,
        grid_size=getattr(args, "grid_size", 512),
        bin_width=args.bin_width,
        out_dir=args.out_dir,
        dump_gram=getattr(args, "dump_gram", None),
        dump_spectrum=getattr(args, "dump_spectrum", None),
        lenient=args.lenient,
        t_col=args.t_col,
        p_col=args.p_col,
        v_col=args.v_col,
        delimiter=args.delimiter,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.profile, args.out)
        config = _config(args)
        if args.command == "analyze":
            return cmd_analyze(config)
        return cmd_histogram(config)
    except (MeasureError, SpectrumError, AnalyticsError) as exc:
        print(f"liqspec: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        print(f"liqspec: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (IngestError, BasisError, ProfileError, ValueError, OSError) as exc:
        print(f"liqspec: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
