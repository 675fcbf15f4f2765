"""Loading, validation and alignment of per-day chain data frames.

Every frame is a CSV file with a mandatory header row, an ISO-8601 ``date``
column and one or more numeric value columns. Two Algorand files carry two
frames each and are split at load time.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import numpy as np

from ._validation import CHAINS, check_choice
from .exceptions import (
    DuplicateDate,
    EmptyIntersection,
    IngestError,
    MissingColumn,
    NoFramesFound,
    NonNumericValue,
    UnknownFrame,
    UnparsableDate,
)

UNITS = ("count", "seconds", "eth", "algo", "percent", "none")
NONNEGATIVE_UNITS = frozenset({"count", "seconds", "eth", "algo", "percent"})

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class FrameSpec:
    """Where a frame lives on disk and which range a healthy value falls in.

    ``kind`` is ``"value"`` for ordinary numeric columns and ``"rowcount"``
    for string-typed files whose only numeric content is the number of rows
    per day. ``optional`` columns are read only when present and when no
    other file supplies the frame.
    """

    name: str
    chain: str
    file_name: str
    column: str
    unit: str
    low: Optional[float] = None
    high: Optional[float] = None
    kind: str = "value"
    optional: bool = False


def _spec(chain, name, file_name, unit, low=None, high=None, column=None, **kw):
    return FrameSpec(name, chain, file_name, column or name, unit, low, high, **kw)


_E, _A = "ethereum2", "algorand"

FRAME_SPECS: Mapping[str, tuple[FrameSpec, ...]] = MappingProxyType({
    _E: (
        _spec(_E, "daily_block_count", "daily_block_count.csv", "count", 0, 7180),
        _spec(_E, "avg_block_time", "avg_blk_time.csv", "seconds", 4.46, 30.57),
        _spec(_E, "avg_gas_used", "gas_used_avg_by_blk.csv", "none", 0, 15511762.25),
        _spec(_E, "transaction_count", "daily_transactions.csv", "count", 0, 1932226),
        _spec(_E, "gas_limit", "gas_limit.csv", "eth", 5000, 30076713.92),
        _spec(_E, "burned_fees", "burned_fees.csv", "eth", 0, 71718.88),
        _spec(_E, "validator_count", "validator_data.csv", "count", 21063, 771738),
        _spec(_E, "avg_validator_balance", "validator_avg_balance.csv", "eth",
              32.00953203, 34.00950871),
        _spec(_E, "participation_rate", "participation_rate.csv", "percent",
              0.941524213, 0.99728444),
        _spec(_E, "network_liveness", "network_Liveness.csv", "count", 2, 12),
    ),
    _A: (
        _spec(_A, "block_info", "al_block_data.csv", "count", kind="rowcount"),
        _spec(_A, "proposer_count", "al_block_data_proposercount_reward.csv", "count", 31, 130),
        _spec(_A, "block_reward", "al_block_data_proposercount_reward.csv", "algo",
              141.059024, 5184.994864, optional=True),
        _spec(_A, "transaction_count", "al_transac_data_count_fee.csv", "count", 913, 9271981),
        _spec(_A, "burned_fees", "al_transac_data_count_fee.csv", "algo", 1.47588, 33113.44687),
        _spec(_A, "block_reward", "al_block_data_reward.csv", "algo", 141.059024, 5184.994864),
        _spec(_A, "contract_calls", "al_contracts_calls_unique_calls.csv", "count", 1, 197459),
        _spec(_A, "unique_calls", "al_contracts_calls_unique_calls.csv", "count", 1, 10149),
    ),
})

FRAME_NAMES = MappingProxyType(
    {chain: tuple(dict.fromkeys(s.name for s in specs)) for chain, specs in FRAME_SPECS.items()}
)


def frame_spec(chain, frame_name):
    """Return the primary (non-optional) spec of a frame."""
    for spec in FRAME_SPECS[check_choice(chain, CHAINS, "chain")]:
        if spec.name == frame_name and not spec.optional:
            return spec
    raise UnknownFrame(f"{chain} datasets have no frame named {frame_name!r}")


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    """Date-indexed daily values of one frame of one chain.

    Construction enforces strictly increasing dates and finite values.
    Sign and range rules are data-quality concerns and are reported by
    :func:`validate_dataset` instead of raising here.
    """

    chain: str
    frame_name: str
    unit: str
    dates: tuple
    values: np.ndarray

    def __post_init__(self):
        check_choice(self.chain, CHAINS, "chain")
        check_choice(self.unit, UNITS, "unit")
        dates = tuple(self.dates)
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if len(dates) != values.size:
            raise ValueError(f"{len(dates)} dates but {values.size} values")
        for prev, cur in zip(dates, dates[1:]):
            if not prev < cur:
                raise ValueError(f"dates not strictly increasing at {cur.isoformat()}")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.frame_name}: non-finite value")
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_points(cls, chain, frame_name, unit, points):
        points = sorted(points, key=lambda p: p[0])
        return cls(chain, frame_name, unit, tuple(d for d, _ in points), [v for _, v in points])

    @property
    def points(self):
        return list(zip(self.dates, self.values.tolist()))

    def __len__(self):
        return len(self.dates)

    def __eq__(self, other):
        if not isinstance(other, ObservationSeries):
            return NotImplemented
        return (
            (self.chain, self.frame_name, self.unit, self.dates)
            == (other.chain, other.frame_name, other.unit, other.dates)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        span = f"{self.dates[0]}..{self.dates[-1]}" if self.dates else "empty"
        return f"ObservationSeries({self.chain}/{self.frame_name}, {len(self)} points, {span})"


@dataclass(frozen=True)
class ChainDataset:
    """One chain's frames, keyed by frame name.

    ``sources`` maps each frame to the file it came from and ``skipped``
    lists files in the directory that were not loaded.
    """

    chain: str
    frames: Mapping[str, ObservationSeries]
    sources: Mapping[str, Path] = field(default_factory=dict)
    skipped: tuple = ()

    def __post_init__(self):
        check_choice(self.chain, CHAINS, "chain")
        for name, series in self.frames.items():
            if name not in FRAME_NAMES[self.chain]:
                raise UnknownFrame(f"{self.chain} datasets have no frame named {name!r}")
            if series.chain != self.chain:
                raise ValueError(f"frame {name!r} is tagged {series.chain}, dataset is {self.chain}")
            if series.frame_name != name:
                raise ValueError(f"frame stored under {name!r} is named {series.frame_name!r}")
        object.__setattr__(self, "frames", MappingProxyType(dict(self.frames)))
        object.__setattr__(self, "sources", MappingProxyType(dict(self.sources)))
        object.__setattr__(self, "skipped", tuple(self.skipped))

    def __contains__(self, name):
        return name in self.frames

    def __getitem__(self, name):
        return self.frames[name]

    @property
    def absent_frames(self):
        return tuple(n for n in FRAME_NAMES[self.chain] if n not in self.frames)


@dataclass(frozen=True)
class Violation:
    frame: str
    row: int
    column: str
    rule: str
    value: float

    def to_dict(self):
        return {"frame": self.frame, "row": self.row, "column": self.column,
                "rule": self.rule, "value": self.value}


@dataclass(frozen=True)
class ValidationReport:
    chain: str
    violations: tuple = ()

    @property
    def passed(self):
        return not self.violations

    def by_frame(self):
        out = {}
        for v in self.violations:
            out.setdefault(v.frame, []).append(v)
        return out

    def to_dict(self):
        return {
            "chain": self.chain,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class AlignedPair:
    dates: tuple
    a: np.ndarray
    b: np.ndarray

    def __len__(self):
        return len(self.dates)


def parse_date(text):
    """Parse ``YYYY-MM-DD``, tolerating a trailing time part."""
    text = text.strip()
    if len(text) > 10 and text[10] in "T ":
        text = text[:10]
    if len(text) != 10:
        raise ValueError(text)
    return dt.date.fromisoformat(text)


def parse_value(text):
    text = text.strip()
    if not _NUMBER.match(text):
        raise ValueError(text)
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _read_csv(path):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("file is empty, header row required", path) from None
        rows = [row for row in reader if any(cell.strip() for cell in row)]
    return [h.strip() for h in header], rows


def _find_column(header, name):
    folded = [h.casefold() for h in header]
    try:
        return folded.index(name.casefold())
    except ValueError:
        return None


def _resolve_columns(header, schema, path, single_frame_file):
    date_names = ("date", "timestamp") if schema.kind == "rowcount" else ("date",)
    date_idx = next((i for n in date_names if (i := _find_column(header, n)) is not None), None)
    if date_idx is None:
        raise MissingColumn(f"no {' or '.join(date_names)} column in header {header}", path)
    if schema.kind == "rowcount":
        return date_idx, None
    value_idx = _find_column(header, schema.column)
    if value_idx is None and single_frame_file and len(header) == 2:
        # bare two-column files: the non-date column is the value
        value_idx = 1 - date_idx
    if value_idx is None:
        raise MissingColumn(f"no {schema.column!r} column in header {header}", path)
    return date_idx, value_idx


def _single_frame_file(schema):
    return sum(1 for s in FRAME_SPECS[schema.chain] if s.file_name == schema.file_name) == 1


def load_frame(path, schema: FrameSpec) -> ObservationSeries:
    """Load one frame from a CSV file.

    The result is sorted by date. A date appearing twice is an error
    (``DuplicateDate``), never merged. For ``rowcount`` frames each day's
    value is the number of rows carrying that day.
    """
    path = Path(path)
    header, rows = _read_csv(path)
    single = _single_frame_file(schema)
    date_idx, value_idx = _resolve_columns(header, schema, path, single)

    if schema.kind == "rowcount":
        counts = {}
        for lineno, row in enumerate(rows, start=2):
            day = _cell_date(row, date_idx, path, lineno)
            counts[day] = counts.get(day, 0) + 1
        return ObservationSeries.from_points(
            schema.chain, schema.name, schema.unit, counts.items())

    seen = {}
    days = set()
    for lineno, row in enumerate(rows, start=2):
        day = _cell_date(row, date_idx, path, lineno)
        if day in days:
            raise DuplicateDate(f"line {lineno}: date {day.isoformat()} repeated", path)
        days.add(day)
        cell = row[value_idx] if value_idx < len(row) else ""
        if not single and not cell.strip():
            # shared files may leave one frame's cell blank on a day
            continue
        try:
            value = parse_value(cell)
        except ValueError:
            raise NonNumericValue(
                f"line {lineno}: {header[value_idx]!r} value {cell!r} is not a finite number",
                path) from None
        seen[day] = value
    return ObservationSeries.from_points(schema.chain, schema.name, schema.unit, seen.items())


def _cell_date(row, idx, path, lineno):
    cell = row[idx] if idx < len(row) else ""
    try:
        return parse_date(cell)
    except ValueError:
        raise UnparsableDate(f"line {lineno}: date {cell!r} is not YYYY-MM-DD", path) from None


def load_chain_dataset(directory, chain) -> ChainDataset:
    """Load every recognised frame file in ``directory``.

    Files that are not part of the chain's layout are listed in
    ``skipped`` rather than loaded. Raises ``NoFramesFound`` when nothing
    is recognised and ``FileNotFoundError`` when the directory is missing.
    """
    check_choice(chain, CHAINS, "chain")
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"data directory not found: {directory}")

    by_file = {}
    for spec in FRAME_SPECS[chain]:
        by_file.setdefault(spec.file_name.casefold(), []).append(spec)

    present = {}
    skipped = []
    for entry in sorted(directory.iterdir()):
        if not entry.is_file():
            continue
        if entry.name.casefold() in by_file:
            present[entry.name.casefold()] = entry
        else:
            skipped.append(entry.name)

    frames, sources = {}, {}
    optional = []
    for key, path in present.items():
        for spec in by_file[key]:
            if spec.optional:
                optional.append((spec, path))
                continue
            frames[spec.name] = load_frame(path, spec)
            sources[spec.name] = path
    for spec, path in optional:
        if spec.name in frames:
            continue
        header, _ = _read_csv(path)
        if _find_column(header, spec.column) is not None:
            frames[spec.name] = load_frame(path, spec)
            sources[spec.name] = path

    if not frames:
        raise NoFramesFound(f"no recognised {chain} frame files", directory)
    return ChainDataset(chain, frames, sources, tuple(skipped))


def _first_violation(spec, value):
    if spec.unit in NONNEGATIVE_UNITS and value < 0:
        return "nonnegative"
    if spec.unit == "percent" and value > 1:
        return "unit_interval"
    if spec.low is not None and value < spec.low:
        return "range"
    if spec.high is not None and value > spec.high:
        return "range"
    return None


def validate_dataset(ds: ChainDataset) -> ValidationReport:
    """List every point breaking its frame's sign, unit-interval or range rule.

    Each point yields at most one violation, the first rule it breaks in
    the order nonnegative, unit_interval, range. Rows are 1-based positions
    in date order.
    """
    violations = []
    for name in sorted(ds.frames):
        spec = frame_spec(ds.chain, name)
        for row, value in enumerate(ds.frames[name].values.tolist(), start=1):
            rule = _first_violation(spec, value)
            if rule is not None:
                violations.append(Violation(name, row, spec.column, rule, value))
    return ValidationReport(ds.chain, tuple(violations))


def align_series(a: ObservationSeries, b: ObservationSeries) -> AlignedPair:
    """Pair two series over the dates they share, in date order."""
    index_b = {d: i for i, d in enumerate(b.dates)}
    ia, ib = [], []
    for i, d in enumerate(a.dates):
        j = index_b.get(d)
        if j is not None:
            ia.append(i)
            ib.append(j)
    if not ia:
        raise EmptyIntersection(f"{a.frame_name} and {b.frame_name} share no dates")
    return AlignedPair(tuple(a.dates[i] for i in ia), a.values[ia], b.values[ib])


def format_value(value):
    return repr(float(value))


def write_frame(series: ObservationSeries, path, column: Optional[str] = None):
    """Write a series as ``date,<column>`` CSV that :func:`load_frame` reads back exactly."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", column or series.frame_name])
        for day, value in zip(series.dates, series.values.tolist()):
            writer.writerow([day.isoformat(), format_value(value)])
    return path


def write_chain_dataset(ds: ChainDataset, directory, frames: Optional[Iterable[str]] = None):
    """Write frames back into the on-disk layout, merging multi-frame files by date."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    wanted = set(ds.frames if frames is None else frames)
    files = {}
    for spec in FRAME_SPECS[ds.chain]:
        if spec.optional or spec.name not in wanted or spec.kind == "rowcount":
            continue
        files.setdefault(spec.file_name, []).append(spec)
    written = []
    for file_name, specs in files.items():
        series = [ds.frames[s.name] for s in specs]
        days = sorted(set().union(*(s.dates for s in series)))
        lookup = [dict(zip(s.dates, s.values.tolist())) for s in series]
        with open(directory / file_name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date"] + [s.column for s in specs])
            for day in days:
                cells = [format_value(m[day]) if day in m else "" for m in lookup]
                writer.writerow([day.isoformat()] + cells)
        written.append(directory / file_name)
    return written
