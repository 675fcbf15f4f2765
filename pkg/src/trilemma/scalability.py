"""Throughput and latency statistics from daily transaction and block-time frames."""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import EmptySeries, FrameMissing, NonPositiveBlockTime
from .ingest import ChainDataset, ObservationSeries

SECONDS_PER_DAY = 86_400
DEFAULT_ALGORAND_BLOCK_TIME = 3.5
TIE = "tie"


@dataclass(frozen=True)
class ThroughputStats:
    mean_daily_tx: float
    peak_daily_tx: float
    peak_date: dt.date
    mean_tps: float
    peak_tps: float


@dataclass(frozen=True)
class LatencyStats:
    mean_block_time: float
    std_block_time: float
    min_block_time: float
    max_block_time: float


@dataclass(frozen=True)
class ChainScalability:
    chain: str
    throughput: ThroughputStats
    latency: LatencyStats
    block_time_injected: bool = False
    # mean block time times mean confirmation depth; informational only
    confirmation_latency: Optional[float] = None

    def to_dict(self):
        t, l = self.throughput, self.latency
        return {
            "mean_daily_tx": t.mean_daily_tx,
            "peak_daily_tx": t.peak_daily_tx,
            "peak_date": t.peak_date.isoformat(),
            "mean_tps": t.mean_tps,
            "peak_tps": t.peak_tps,
            "mean_block_time": l.mean_block_time,
            "std_block_time": l.std_block_time,
            "min_block_time": l.min_block_time,
            "max_block_time": l.max_block_time,
            "block_time_injected": self.block_time_injected,
            "confirmation_latency": self.confirmation_latency,
        }


@dataclass(frozen=True)
class ScalabilityComparison:
    a: ChainScalability
    b: ChainScalability
    higher_peak_chain: str
    lower_latency_chain: str

    @property
    def chains(self):
        return (self.a, self.b)

    def to_dict(self):
        return {
            "chains": {c.chain: c.to_dict() for c in self.chains},
            "verdicts": {
                "higher_peak_chain": self.higher_peak_chain,
                "lower_latency_chain": self.lower_latency_chain,
            },
        }


def _mean(values):
    return math.fsum(values) / len(values)


def throughput_stats(tx: ObservationSeries) -> ThroughputStats:
    """Mean and peak daily transactions, plus the same as per-second rates.

    The peak goes to the earliest date when several days share the maximum.
    """
    if len(tx) == 0:
        raise EmptySeries(f"{tx.frame_name} has no points")
    values = tx.values.tolist()
    mean = _mean(values)
    peak_idx = int(np.argmax(tx.values))  # first occurrence = earliest date
    peak = values[peak_idx]
    return ThroughputStats(mean, peak, tx.dates[peak_idx],
                           mean / SECONDS_PER_DAY, peak / SECONDS_PER_DAY)


def latency_stats(bt: ObservationSeries) -> LatencyStats:
    """Block-time summary; ``std_block_time`` is the population standard deviation."""
    if len(bt) == 0:
        raise EmptySeries(f"{bt.frame_name} has no points")
    if np.any(bt.values <= 0):
        bad = bt.values[bt.values <= 0][0]
        raise NonPositiveBlockTime(f"{bt.frame_name} contains block time {bad!r}")
    values = bt.values.tolist()
    mean = _mean(values)
    var = math.fsum((v - mean) ** 2 for v in values) / len(values)
    return LatencyStats(mean, math.sqrt(var), min(values), max(values))


def constant_block_time(ds: ChainDataset, seconds: float) -> ObservationSeries:
    """A block-time series pinned at ``seconds`` on every day of the transaction frame."""
    if "transaction_count" not in ds:
        raise FrameMissing("transaction_count", ds.chain)
    dates = ds["transaction_count"].dates
    return ObservationSeries(ds.chain, "avg_block_time", "seconds", dates, [seconds] * len(dates))


def chain_scalability(ds: ChainDataset,
                      algorand_block_time: float = DEFAULT_ALGORAND_BLOCK_TIME) -> ChainScalability:
    if "transaction_count" not in ds:
        raise FrameMissing("transaction_count", ds.chain)
    block_times, injected = block_time_series(ds, algorand_block_time)
    latency = latency_stats(block_times)
    confirmation = None
    if "network_liveness" in ds and len(ds["network_liveness"]):
        confirmation = latency.mean_block_time * _mean(ds["network_liveness"].values.tolist())
    return ChainScalability(ds.chain, throughput_stats(ds["transaction_count"]), latency,
                            injected, confirmation)


def block_time_series(ds: ChainDataset, algorand_block_time=DEFAULT_ALGORAND_BLOCK_TIME):
    """The block-time series used for latency and whether it was injected.

    Algorand publishes no per-day block time; its series is a constant.
    """
    if "avg_block_time" in ds:
        return ds["avg_block_time"], False
    if ds.chain == "algorand":
        return constant_block_time(ds, algorand_block_time), True
    raise FrameMissing("avg_block_time", ds.chain)


def _verdict(a_name, a_val, b_name, b_val, higher_wins):
    if a_val == b_val or a_name == b_name:
        return TIE
    a_wins = a_val > b_val if higher_wins else a_val < b_val
    return a_name if a_wins else b_name


def compare_scalability(a: ChainDataset, b: ChainDataset,
                        algorand_block_time: float = DEFAULT_ALGORAND_BLOCK_TIME) -> ScalabilityComparison:
    """Name the chain with the higher peak volume and the one with the lower mean block time."""
    sa = chain_scalability(a, algorand_block_time)
    sb = chain_scalability(b, algorand_block_time)
    peak = _verdict(sa.chain, sa.throughput.peak_daily_tx, sb.chain, sb.throughput.peak_daily_tx, True)
    latency = _verdict(sa.chain, sa.latency.mean_block_time, sb.chain, sb.latency.mean_block_time, False)
    return ScalabilityComparison(sa, sb, peak, latency)
