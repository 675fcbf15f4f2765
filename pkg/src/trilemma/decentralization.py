"""Decentralization indices over a share vector.

All four indices read a :class:`WeightVector`, the normalized shares of the
units of one layer. A unit is one day's value of the layer frame, so a
whole series is the population and a trailing window is a sub-population.

The Gini coefficient here is ``1 - sum(p**2)`` (Gini-Simpson), not the
Lorenz-curve Gini, which makes it the exact complement of the HHI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._validation import CHAINS, INDEX_NAMES, LAYERS, check_choice, check_share_vector, check_threshold, check_window
from .exceptions import FrameMissing
from .ingest import ChainDataset, ObservationSeries

DEFAULT_THRESHOLD = 0.51
DEFAULT_WINDOW = 7

# Values published for the 2019-2023 collection windows, used only as a
# diagnostic baseline. The Gini entries cannot be reproduced by 1 - HHI.
PUBLISHED_INDICES = {
    ("algorand", "consensus"): {"shannon_entropy": 1364.34, "gini": 0.155, "nakamoto": 821, "hhi": 0.0005},
    ("algorand", "transaction"): {"shannon_entropy": 920.192, "gini": 0.155, "nakamoto": 931, "hhi": 0.00015},
    ("ethereum2", "consensus"): {"shannon_entropy": 866.759, "gini": 0.301, "nakamoto": 705, "hhi": 0.0021},
    ("ethereum2", "transaction"): {"shannon_entropy": 2252.60, "gini": 0.301, "nakamoto": 2067, "hhi": 0.0004},
}

_LAYER_FRAMES = {
    ("consensus", "algorand"): "proposer_count",
    ("consensus", "ethereum2"): "validator_count",
    ("transaction", "algorand"): "transaction_count",
    ("transaction", "ethereum2"): "transaction_count",
}


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Normalized shares of a set of units.

    ``values`` keeps the raw inputs so threshold comparisons can be settled
    exactly; ``source_total`` is their (correctly rounded) sum.
    """

    weights: np.ndarray
    source_total: float
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if weights.size == 0 or np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be a non-empty vector of finite nonnegative shares")
        if abs(math.fsum(weights) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {math.fsum(weights)!r}, expected 1")
        if not self.source_total > 0:
            raise ValueError("source_total must be positive")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        if self.values is not None:
            values = np.array(self.values, dtype=np.float64).reshape(-1)
            if values.shape != weights.shape:
                raise ValueError("values and weights differ in length")
            values.setflags(write=False)
            object.__setattr__(self, "values", values)

    def __len__(self):
        return self.weights.size

    @property
    def n_nonzero(self):
        return int(np.count_nonzero(self.weights))

    @property
    def raw(self):
        """The raw unit values, reconstructed from the shares if not kept."""
        if self.values is not None:
            return self.values
        return self.weights * self.source_total


def normalize(values) -> WeightVector:
    """Turn nonnegative unit values into shares, preserving order.

    >>> normalize([5, 3, 2]).weights.tolist()
    [0.5, 0.3, 0.2]
    """
    arr = check_share_vector(values)
    total = math.fsum(arr)
    return WeightVector(arr / total, total, arr)


def shannon_entropy_index(w: WeightVector) -> float:
    """Exponential of the natural-log entropy, ``prod(p ** -p)``.

    Evaluated as ``exp(-sum(p * ln p))`` so long vectors do not underflow.
    Zero shares contribute a factor of one. Ranges from 1 (one unit holds
    everything) to the number of nonzero units (uniform shares).
    """
    p = w.weights[w.weights > 0]
    return math.exp(-math.fsum(p * np.log(p)))


def hhi(w: WeightVector) -> float:
    """Herfindahl-Hirschman index, the sum of squared shares."""
    p = w.weights
    return math.fsum(p * p)


def gini_coefficient(w: WeightVector) -> float:
    """``1 - sum(p**2)``; zero at full concentration, ``1 - 1/N`` when uniform."""
    return 1.0 - hhi(w)


def _exact_integers(values):
    """Scale floats to integers sharing one power-of-two denominator."""
    ratios = [float(v).as_integer_ratio() for v in values]
    denom = max(d for _, d in ratios)
    return [n * (denom // d) for n, d in ratios]


def nakamoto_coefficient(w: WeightVector, threshold: float = DEFAULT_THRESHOLD) -> int:
    """Smallest number of largest units whose combined share strictly exceeds ``threshold``.

    The threshold is taken as the decimal it prints as (0.51 means 51/100),
    so a prefix holding exactly 51% does not count. Comparisons that float
    rounding cannot settle are redone in exact integer arithmetic.
    """
    threshold = check_threshold(threshold)
    raw = w.raw
    desc = np.sort(raw[raw > 0])[::-1]
    csum = np.cumsum(desc)
    total = float(csum[-1])
    target = threshold * total
    slack = 1e-9 * total
    lo = int(np.searchsorted(csum, target - slack, side="right"))
    hi = min(int(np.searchsorted(csum, target + slack, side="right")), desc.size - 1)
    if lo >= hi:
        return min(lo, desc.size - 1) + 1

    exact = Fraction(repr(threshold))
    ints = _exact_integers(desc)
    bound = exact.numerator * sum(ints)
    prefix = sum(ints[:lo])
    for k in range(lo, hi + 1):
        prefix += ints[k]
        if prefix * exact.denominator > bound:
            return k + 1
    return hi + 1


INDEX_FUNCTIONS = {
    "shannon": shannon_entropy_index,
    "gini": gini_coefficient,
    "nakamoto": nakamoto_coefficient,
    "hhi": hhi,
}


def compute_index(w: WeightVector, index: str, threshold: float = DEFAULT_THRESHOLD):
    check_choice(index, INDEX_NAMES, "index")
    if index == "nakamoto":
        return nakamoto_coefficient(w, threshold)
    return INDEX_FUNCTIONS[index](w)


@dataclass(frozen=True)
class LayerSelector:
    layer: str
    chain: str

    def __post_init__(self):
        check_choice(self.layer, LAYERS, "layer")
        check_choice(self.chain, CHAINS, "chain")

    @property
    def frame_name(self):
        return _LAYER_FRAMES[(self.layer, self.chain)]


@dataclass(frozen=True)
class DecentralizationRow:
    """One (chain, layer) row of the decentralization table."""

    chain: str
    layer: str
    shannon_entropy: float
    gini: float
    nakamoto: int
    hhi: float
    unit_count: int

    FIELDS = ("chain", "layer", "shannon_entropy", "gini", "nakamoto", "hhi", "unit_count")

    def to_dict(self):
        return {f: getattr(self, f) for f in self.FIELDS}


def layer_series(ds: ChainDataset, sel: LayerSelector) -> ObservationSeries:
    if sel.chain != ds.chain:
        raise ValueError(f"selector is for {sel.chain}, dataset is {ds.chain}")
    name = sel.frame_name
    if name not in ds.frames:
        raise FrameMissing(name, ds.chain)
    return ds.frames[name]


def indices_of(values, threshold: float = DEFAULT_THRESHOLD) -> dict:
    """All four indices of raw unit values, zeros dropped, from one normalization."""
    arr = check_share_vector(values)
    w = normalize(arr[arr > 0])
    return {
        "shannon_entropy": shannon_entropy_index(w),
        "gini": gini_coefficient(w),
        "nakamoto": nakamoto_coefficient(w, threshold),
        "hhi": hhi(w),
        "unit_count": len(w),
    }


def aggregate_indices(ds: ChainDataset, sel: LayerSelector,
                      threshold: float = DEFAULT_THRESHOLD) -> DecentralizationRow:
    """Whole-series indices of a layer, each positive day being one unit."""
    series = layer_series(ds, sel)
    return DecentralizationRow(sel.chain, sel.layer, **indices_of(series.values, threshold))


def rolling_index_series(series: ObservationSeries, window: int = DEFAULT_WINDOW,
                         index: str = "shannon",
                         threshold: float = DEFAULT_THRESHOLD) -> ObservationSeries:
    """Index over each trailing window of ``window`` present days.

    The point for day t uses the values of t and the ``window - 1`` days
    present before it. Windows holding only zeros emit nothing.
    """
    window = check_window(window, len(series))
    check_choice(index, INDEX_NAMES, "index")
    threshold = check_threshold(threshold)
    values = series.values
    points = []
    for end in range(window, len(series) + 1):
        chunk = values[end - window:end]
        if np.any(chunk < 0):
            chunk = check_share_vector(chunk)  # raises NegativeValue
        positive = chunk[chunk > 0]
        if positive.size == 0:
            continue
        points.append((series.dates[end - 1], compute_index(normalize(positive), index, threshold)))
    return ObservationSeries.from_points(
        series.chain, f"{series.frame_name}_{index}_w{window}", "none", points)


def published_deviations(rows) -> list:
    """Signed deviations (computed minus published) for every available index."""
    out = []
    for row in rows:
        published = PUBLISHED_INDICES.get((row.chain, row.layer))
        if published is None:
            continue
        for name, ref in published.items():
            value = getattr(row, name)
            out.append({
                "chain": row.chain, "layer": row.layer, "index": name,
                "computed": value, "published": ref, "deviation": value - ref,
            })
    return out
