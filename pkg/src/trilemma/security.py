"""Burned-fee statistics and a Monte Carlo proposer-selection attack simulator.

The simulator runs a stake-weighted lottery over a 64-bit randomness space.
An adversary coalition holding stake fraction ``alpha`` is chosen whenever
the round's randomness falls below ``alpha * 2**64``. Two randomness
sources are modelled:

``seed_chain``
    every round draws fresh randomness that nobody can influence.
``xor_accumulator``
    the next round's randomness is the current one XOR-ed with the
    proposer's reveal. An adversarial proposer reveals last and may try
    ``2**grinding_bits`` candidate reveals, keeping the first that hands it
    the next round as well. Honest reveals are uniform.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

import numpy as np

from .exceptions import EmptySeries, InvalidConfig, ZeroVariance
from .ingest import ObservationSeries, align_series

SCHEMES = ("seed_chain", "xor_accumulator")
SPACE_BITS = 64
MAX_GRINDING_BITS = 16
THREADS_ENV = "TRILEMMA_THREADS"


@dataclass(frozen=True)
class FeeStats:
    daily_mean: float
    total: float
    std: float
    days: int

    def to_dict(self):
        return asdict(self)


def burned_fee_stats(fees: ObservationSeries) -> FeeStats:
    """Daily mean, total and population standard deviation of burned fees."""
    if len(fees) == 0:
        raise EmptySeries(f"{fees.frame_name} has no points")
    values = fees.values.tolist()
    total = math.fsum(values)
    mean = total / len(values)
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))
    return FeeStats(mean, total, std, len(values))


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - math.fsum(x) / x.size
    dy = y - math.fsum(y) / y.size
    sx, sy = np.abs(dx).max(initial=0.0), np.abs(dy).max(initial=0.0)
    if sx == 0 or sy == 0:
        raise ZeroVariance("correlation undefined for a constant series")
    dx, dy = dx / sx, dy / sy  # r is scale-free; this keeps the products clear of underflow
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def fee_security_correlation(fees: ObservationSeries, tx: ObservationSeries) -> float:
    """Pearson correlation of burned fees against transactions over shared days."""
    pair = align_series(fees, tx)
    if len(pair) < 3:
        raise ZeroVariance(f"need at least 3 shared days, got {len(pair)}")
    return pearson(pair.a, pair.b)


@dataclass(frozen=True)
class AttackSimConfig:
    scheme: str = "seed_chain"
    adversary_stake: float = 0.3
    honest_validators: int = 100
    rounds: int = 1000
    trials: int = 100
    grinding_bits: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        validate_config(self)


def validate_config(cfg: AttackSimConfig):
    if cfg.scheme not in SCHEMES:
        raise InvalidConfig(f"scheme must be one of {SCHEMES}, got {cfg.scheme!r}")
    alpha = cfg.adversary_stake
    if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not 0 <= alpha < 1:
        raise InvalidConfig(f"adversary_stake must lie in [0, 1), got {alpha!r}")
    for name, low in (("honest_validators", 1), ("rounds", 1), ("trials", 1), ("grinding_bits", 0)):
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < low:
            raise InvalidConfig(f"{name} must be an integer >= {low}, got {value!r}")
    if cfg.grinding_bits > MAX_GRINDING_BITS:
        raise InvalidConfig(f"grinding_bits above {MAX_GRINDING_BITS} is not supported")
    if cfg.scheme == "seed_chain" and cfg.grinding_bits != 0:
        raise InvalidConfig("grinding_bits must be 0 for the seed_chain scheme")
    if not isinstance(cfg.rng_seed, (int, np.integer)) or not 0 <= cfg.rng_seed < 2**64:
        raise InvalidConfig(f"rng_seed must be an unsigned 64-bit integer, got {cfg.rng_seed!r}")


@dataclass(frozen=True)
class AttackSimResult:
    config: AttackSimConfig
    adversary_rounds: int
    total_rounds: int
    max_consecutive_adversary: int
    ground_rounds: int
    ground_adversary_rounds: int

    @property
    def adversary_share(self):
        return self.adversary_rounds / self.total_rounds

    @property
    def bias(self):
        return self.adversary_share - self.config.adversary_stake

    @property
    def stderr(self):
        p = self.adversary_share
        return math.sqrt(p * (1 - p) / self.total_rounds)

    @property
    def ground_share(self):
        """Adversary rate on rounds that follow an adversarial round."""
        if not self.ground_rounds:
            return float("nan")
        return self.ground_adversary_rounds / self.ground_rounds

    @property
    def ground_stderr(self):
        if not self.ground_rounds:
            return float("nan")
        p = self.ground_share
        return math.sqrt(p * (1 - p) / self.ground_rounds)

    def to_row(self):
        c = self.config
        return {
            "scheme": c.scheme,
            "alpha": c.adversary_stake,
            "grinding_bits": c.grinding_bits,
            "honest_validators": c.honest_validators,
            "rounds": c.rounds,
            "trials": c.trials,
            "adversary_share": self.adversary_share,
            "bias": self.bias,
            "stderr": self.stderr,
            "max_consecutive": self.max_consecutive_adversary,
            "ground_rounds": self.ground_rounds,
            "ground_share": None if not self.ground_rounds else self.ground_share,
            "rng_seed": c.rng_seed,
        }


ROW_FIELDS = ("scheme", "alpha", "grinding_bits", "honest_validators", "rounds", "trials",
              "adversary_share", "bias", "stderr", "max_consecutive", "ground_rounds",
              "ground_share", "rng_seed")


def adversary_cutoff(alpha, space_bits=SPACE_BITS):
    """Randomness values below the cutoff elect the adversary."""
    return int(Fraction(alpha) * (1 << space_bits))


def select_proposer(r, cutoff, honest_validators, space_bits=SPACE_BITS):
    """Proposer for randomness ``r``: -1 for the adversary, else an honest index.

    The honest remainder of the space is split evenly among honest validators.
    """
    if r < cutoff:
        return -1
    return (r - cutoff) * honest_validators // ((1 << space_bits) - cutoff)


def grind_reveal(current, candidates, cutoff):
    """The reveal an adversarial last revealer commits.

    Picks the first candidate that makes the next round adversarial, or the
    first candidate when none does.
    """
    for c in candidates:
        if current ^ c < cutoff:
            return c
    return candidates[0]


def ground_success_probability(alpha, grinding_bits):
    """Chance that at least one of ``2**g`` uniform candidates elects the adversary."""
    return 1.0 - (1.0 - alpha) ** (2 ** grinding_bits)


def _longest_run(flags):
    best = run = 0
    for f in flags:
        run = run + 1 if f else 0
        if run > best:
            best = run
    return best


def _trial_seed_chain(rng, cfg, cutoff):
    r = rng.integers(0, 2**64, size=cfg.rounds, dtype=np.uint64)
    adv = r < np.uint64(cutoff)
    n_adv = int(adv.sum())
    ground = int(adv[:-1].sum())
    ground_adv = int((adv[:-1] & adv[1:]).sum())
    return n_adv, _longest_run(adv.tolist()), ground, ground_adv


def _trial_xor(rng, cfg, cutoff):
    # draw order is fixed so runs differing only in grinding_bits share streams
    start = int(rng.integers(0, 2**64, dtype=np.uint64))
    honest = rng.integers(0, 2**64, size=cfg.rounds, dtype=np.uint64).tolist()
    n_cand = 1 << cfg.grinding_bits
    cands = rng.integers(0, 2**64, size=(n_cand, cfg.rounds), dtype=np.uint64).T.tolist()
    r = start
    flags = []
    for t in range(cfg.rounds):
        is_adv = r < cutoff
        flags.append(is_adv)
        reveal = grind_reveal(r, cands[t], cutoff) if is_adv else honest[t]
        r ^= reveal
    n_adv = sum(flags)
    ground = sum(flags[:-1])
    ground_adv = sum(1 for a, b in zip(flags, flags[1:]) if a and b)
    return n_adv, _longest_run(flags), ground, ground_adv


def _threads():
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def simulate_attack(cfg: AttackSimConfig) -> AttackSimResult:
    """Run ``cfg.trials`` independent trials of ``cfg.rounds`` proposer selections.

    Each trial owns a stream spawned from ``cfg.rng_seed``, so results are
    bit-identical for identical configs whatever the thread count.
    """
    validate_config(cfg)
    cutoff = adversary_cutoff(cfg.adversary_stake)
    run_trial = _trial_seed_chain if cfg.scheme == "seed_chain" else _trial_xor
    streams = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.trials)

    def one(ss):
        return run_trial(np.random.default_rng(ss), cfg, cutoff)

    workers = min(_threads(), cfg.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, streams))
    else:
        outcomes = [one(ss) for ss in streams]

    return AttackSimResult(
        config=cfg,
        adversary_rounds=sum(o[0] for o in outcomes),
        total_rounds=cfg.rounds * cfg.trials,
        max_consecutive_adversary=max(o[1] for o in outcomes),
        ground_rounds=sum(o[2] for o in outcomes),
        ground_adversary_rounds=sum(o[3] for o in outcomes),
    )


def sweep_attack(template: AttackSimConfig, alphas) -> list:
    """One simulation per stake level, the i-th seeded with ``rng_seed ^ i``."""
    configs = []
    for i, alpha in enumerate(alphas):
        try:
            configs.append(replace(template, adversary_stake=alpha, rng_seed=template.rng_seed ^ i))
        except InvalidConfig as exc:
            raise InvalidConfig(f"sweep entry {i}: {exc}") from None
    return [simulate_attack(c) for c in configs]
