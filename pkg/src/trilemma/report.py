"""Assembling and serializing the combined decentralization/scalability/security report."""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from ._validation import LAYERS
from .decentralization import (
    DEFAULT_THRESHOLD,
    DEFAULT_WINDOW,
    DecentralizationRow,
    LayerSelector,
    aggregate_indices,
    layer_series,
    published_deviations,
    rolling_index_series,
)
from .exceptions import TrilemmaError
from .ingest import ChainDataset, ObservationSeries, format_value, validate_dataset
from .scalability import DEFAULT_ALGORAND_BLOCK_TIME, ScalabilityComparison, block_time_series, compare_scalability
from .security import (
    ROW_FIELDS,
    AttackSimConfig,
    AttackSimResult,
    burned_fee_stats,
    fee_security_correlation,
    sweep_attack,
)

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2
DECENTRALIZATION_FIELDS = DecentralizationRow.FIELDS
SCALABILITY_FIELDS = ("chain", "mean_daily_tx", "peak_daily_tx", "peak_date", "mean_tps", "peak_tps",
                      "mean_block_time", "std_block_time", "min_block_time", "max_block_time",
                      "block_time_injected", "confirmation_latency")
SECURITY_FIELDS = ("chain", "daily_mean", "total", "std", "days", "fee_tx_correlation")
# frames the report reads; everything else is optional
CONSUMED_FRAMES = {
    "algorand": ("proposer_count", "transaction_count", "burned_fees"),
    "ethereum2": ("validator_count", "transaction_count", "burned_fees", "avg_block_time"),
}


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def input_provenance(datasets):
    """One entry per distinct file consumed, in a stable order."""
    files = {}
    for ds in datasets:
        for frame, path in ds.sources.items():
            entry = files.setdefault(str(path), {"path": str(path), "frames": []})
            entry["frames"].append(f"{ds.chain}/{frame}")
    out = []
    for key in sorted(files):
        entry = files[key]
        path = Path(entry["path"])
        entry["sha256"] = sha256_file(path)
        entry["bytes"] = path.stat().st_size
        entry["frames"].sort()
        out.append(entry)
    return out


@dataclass
class ReportConfig:
    window: int = DEFAULT_WINDOW
    threshold: float = DEFAULT_THRESHOLD
    rolling_indices: tuple = ("shannon",)
    algorand_block_time: float = DEFAULT_ALGORAND_BLOCK_TIME
    simulations: tuple = ()
    sweep: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["simulations"] = [asdict(c) for c in self.simulations]
        d["rolling_indices"] = list(self.rolling_indices)
        d["sweep"] = list(self.sweep)
        return d


@dataclass
class TrilemmaReport:
    decentralization: list = field(default_factory=list)
    rolling: dict = field(default_factory=dict)
    scalability: Optional[ScalabilityComparison] = None
    fees: dict = field(default_factory=dict)
    correlations: dict = field(default_factory=dict)
    simulations: list = field(default_factory=list)
    validation: dict = field(default_factory=dict)
    absent_frames: dict = field(default_factory=dict)
    skipped_files: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        if self.errors or any(not v.passed for v in self.validation.values()):
            return EXIT_DATA
        return EXIT_OK

    def payload(self):
        """Everything except the generation timestamp."""
        prov = {k: v for k, v in self.provenance.items() if k != "generated_at"}
        return _clean({
            "decentralization": [r.to_dict() for r in self.decentralization],
            "published_deviations": published_deviations(self.decentralization),
            "scalability": self.scalability.to_dict() if self.scalability else None,
            "security": {
                chain: {**stats.to_dict(), "fee_tx_correlation": self.correlations.get(chain)}
                for chain, stats in self.fees.items()
            },
            "simulations": [r.to_row() for r in self.simulations],
            "validation": {chain: v.to_dict() for chain, v in self.validation.items()},
            "absent_frames": self.absent_frames,
            "skipped_files": self.skipped_files,
            "errors": self.errors,
            "provenance": prov,
        })

    def to_dict(self):
        d = self.payload()
        d["provenance"]["generated_at"] = self.provenance.get("generated_at")
        return d


def _clean(obj):
    """Replace non-finite floats with None so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def decentralization_rows(datasets, threshold=DEFAULT_THRESHOLD):
    """Rows for every (chain, layer) plus a list of per-row error messages."""
    rows, errors = [], []
    for ds in datasets:
        for layer in LAYERS:
            try:
                rows.append(aggregate_indices(ds, LayerSelector(layer, ds.chain), threshold))
            except TrilemmaError as exc:
                errors.append(f"decentralization {ds.chain}/{layer}: {exc}")
    return rows, errors


def rolling_series(datasets, window, indices, threshold=DEFAULT_THRESHOLD):
    """Rolling index series keyed by (chain, layer, index); skips what cannot be computed."""
    out, errors = {}, []
    for ds in datasets:
        for layer in LAYERS:
            try:
                series = layer_series(ds, LayerSelector(layer, ds.chain))
            except TrilemmaError:
                continue  # already reported by the aggregate row
            for index in indices:
                try:
                    out[(ds.chain, layer, index)] = rolling_index_series(series, window, index, threshold)
                except (TrilemmaError, ValueError) as exc:
                    errors.append(f"rolling {ds.chain}/{layer}/{index}: {exc}")
    return out, errors


def build_report(datasets, config: ReportConfig) -> TrilemmaReport:
    """Run every analysis over the datasets, collecting failures instead of stopping."""
    datasets = list(datasets)
    report = TrilemmaReport()
    for ds in datasets:
        report.validation[ds.chain] = validate_dataset(ds)
        report.absent_frames[ds.chain] = list(ds.absent_frames)
        report.skipped_files[ds.chain] = list(ds.skipped)
        missing = [f for f in CONSUMED_FRAMES[ds.chain] if f not in ds
                   and not (f == "avg_block_time" and ds.chain == "algorand")]
        report.errors.extend(f"{ds.chain}: required frame {f!r} missing" for f in missing)

    report.decentralization, errs = decentralization_rows(datasets, config.threshold)
    report.rolling, rerrs = rolling_series(datasets, config.window, config.rolling_indices, config.threshold)
    report.errors.extend(errs + rerrs)

    if len(datasets) == 2:
        try:
            report.scalability = compare_scalability(*datasets, config.algorand_block_time)
        except TrilemmaError as exc:
            report.errors.append(f"scalability: {exc}")

    for ds in datasets:
        if "burned_fees" not in ds:
            continue
        try:
            report.fees[ds.chain] = burned_fee_stats(ds["burned_fees"])
        except TrilemmaError as exc:
            report.errors.append(f"fees {ds.chain}: {exc}")
            continue
        if "transaction_count" in ds:
            try:
                report.correlations[ds.chain] = fee_security_correlation(
                    ds["burned_fees"], ds["transaction_count"])
            except TrilemmaError as exc:
                report.correlations[ds.chain] = None
                report.errors.append(f"fee correlation {ds.chain}: {exc}")

    for template in config.simulations:
        report.simulations.extend(sweep_attack(template, config.sweep or (template.adversary_stake,)))

    report.provenance = {
        "tool": "trilemma",
        "tool_version": __version__,
        "inputs": input_provenance(datasets),
        "config": config.to_dict(),
        "generated_at": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return report


def write_json(obj, path):
    path = Path(path)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_value(value) if math.isfinite(value) else ""
    return value


def write_csv(rows, fields, path):
    """RFC-4180 CSV with a header row; missing keys become empty cells."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_cell(row.get(f)) for f in fields])
    return path


def write_series_csv(series: ObservationSeries, path, column="value"):
    rows = [{"date": d.isoformat(), column: v} for d, v in series.points]
    return write_csv(rows, ("date", column), path)


def scalability_rows(comparison: ScalabilityComparison):
    return [{"chain": c.chain, **c.to_dict()} for c in comparison.chains]


def security_rows(report: TrilemmaReport):
    return [{"chain": chain, **stats.to_dict(), "fee_tx_correlation": report.correlations.get(chain)}
            for chain, stats in report.fees.items()]


def write_rolling(rolling, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for (chain, layer, index), series in sorted(rolling.items()):
        written.append(write_series_csv(series, directory / f"{chain}_{layer}_{index}.csv", index))
    return written


def write_scalability_plots(datasets, algorand_block_time, directory):
    """Daily transaction and block-time CSVs holding exactly the points behind the statistics."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for ds in datasets:
        if "transaction_count" in ds:
            written.append(write_series_csv(ds["transaction_count"],
                                            directory / f"daily_tx_{ds.chain}.csv", "transaction_count"))
        try:
            series, _ = block_time_series(ds, algorand_block_time)
        except TrilemmaError:
            continue
        written.append(write_series_csv(series, directory / f"daily_block_time_{ds.chain}.csv",
                                        "avg_block_time"))
    return written


def write_report(report: TrilemmaReport, datasets, config: ReportConfig, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(report.to_dict(), out_dir / "report.json")
    write_csv([r.to_dict() for r in report.decentralization], DECENTRALIZATION_FIELDS,
              out_dir / "decentralization.csv")
    if report.scalability is not None:
        write_csv(scalability_rows(report.scalability), SCALABILITY_FIELDS, out_dir / "scalability.csv")
    write_csv(security_rows(report), SECURITY_FIELDS, out_dir / "security.csv")
    write_csv([r.to_row() for r in report.simulations], ROW_FIELDS, out_dir / "simulations.csv")
    write_rolling(report.rolling, out_dir / "rolling")
    write_scalability_plots(datasets, config.algorand_block_time, out_dir / "plots")
    return out_dir / "report.json"
