import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import days
from trilemma.exceptions import EmptyIntersection, EmptySeries, InvalidConfig, ZeroVariance
from trilemma.ingest import ObservationSeries
from trilemma.security import (
    AttackSimConfig,
    adversary_cutoff,
    burned_fee_stats,
    fee_security_correlation,
    grind_reveal,
    ground_success_probability,
    pearson,
    select_proposer,
    simulate_attack,
    sweep_attack,
)


def fees(values, start_offset=0):
    return ObservationSeries("ethereum2", "burned_fees", "eth",
                             days(len(values) + start_offset)[start_offset:], values)


def txs(values, start_offset=0):
    return ObservationSeries("ethereum2", "transaction_count", "count",
                             days(len(values) + start_offset)[start_offset:], values)


class TestFees:
    def test_basic(self):
        s = burned_fee_stats(fees([10, 20, 30]))
        assert (s.daily_mean, s.total, s.days) == (20, 60, 3)
        assert s.std == pytest.approx(math.sqrt(200 / 3))

    def test_single_point(self):
        s = burned_fee_stats(fees([7]))
        assert (s.daily_mean, s.std) == (7, 0)

    def test_empty(self):
        with pytest.raises(EmptySeries):
            burned_fee_stats(fees([]))

    @given(st.lists(st.floats(0, 1e6), min_size=1, max_size=100))
    def test_total_identity(self, values):
        s = burned_fee_stats(fees(values))
        assert s.total == pytest.approx(s.daily_mean * s.days, rel=1e-9, abs=1e-300)
        assert s.std >= 0


class TestCorrelation:
    def test_perfect_positive(self):
        x = [1, 4, 2, 8, 5]
        assert fee_security_correlation(fees([2 * v for v in x]), txs(x)) == pytest.approx(1.0, abs=1e-15)

    def test_perfect_negative(self):
        x = [1, 4, 2, 8, 5]
        assert fee_security_correlation(fees([100 - v for v in x]), txs(x)) == pytest.approx(-1.0, abs=1e-15)

    def test_constant_fees(self):
        with pytest.raises(ZeroVariance):
            fee_security_correlation(fees([3, 3, 3]), txs([1, 2, 3]))

    @pytest.mark.parametrize("scale", [2.5e-157, 1e-300, 1e300])
    def test_extreme_magnitudes(self, scale):
        x = [0.0, 0.0, scale]
        assert pearson(x, x) == 1.0
        assert pearson(x, [1.0, 2.0, 0.0]) == pytest.approx(-math.sqrt(3) / 2, abs=1e-15)

    def test_too_few_common_days(self):
        with pytest.raises(ZeroVariance):
            fee_security_correlation(fees([1, 2, 3]), txs([1, 2, 3], start_offset=1))

    def test_disjoint(self):
        with pytest.raises(EmptyIntersection):
            fee_security_correlation(fees([1, 2, 3]), txs([1, 2, 3], start_offset=10))

    @given(st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=50), st.data())
    def test_self_and_symmetry(self, x, data):
        y = data.draw(st.lists(st.floats(-1e6, 1e6), min_size=len(x), max_size=len(x)))
        try:
            assert pearson(x, x) == 1.0
        except ZeroVariance:
            return
        try:
            r = pearson(x, y)
        except ZeroVariance:
            return
        assert r == pearson(y, x)
        assert -1 <= r <= 1


class TestLottery:
    def test_selection_space_split(self):
        space = 4
        cutoff = adversary_cutoff(0.25, space)
        assert cutoff == 4
        picks = [select_proposer(r, cutoff, 3, space) for r in range(16)]
        assert picks.count(-1) == 4
        assert [picks.count(i) for i in range(3)] == [4, 4, 4]

    @pytest.mark.parametrize("tickets,g", [(4, 1), (5, 1), (3, 2), (8, 1), (0, 1), (4, 0)])
    def test_grinding_enumeration_oracle(self, tickets, g):
        # exhaustive over current randomness and every candidate tuple in a 4-bit space
        space, size = 4, 16
        alpha = Fraction(tickets, size)
        cutoff = adversary_cutoff(alpha, space)
        wins = total = 0
        for current in range(size):
            for cands in itertools.product(range(size), repeat=2 ** g):
                nxt = current ^ grind_reveal(current, list(cands), cutoff)
                wins += select_proposer(nxt, cutoff, 3, space) == -1
                total += 1
        assert Fraction(wins, total) == 1 - (1 - alpha) ** (2 ** g)
        assert float(Fraction(wins, total)) == pytest.approx(ground_success_probability(float(alpha), g))

    def test_closed_form_at_thirty_percent(self):
        assert ground_success_probability(0.3, 1) == pytest.approx(0.51, abs=1e-15)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"adversary_stake": 1.0}, {"adversary_stake": -0.1}, {"adversary_stake": 1.5},
        {"rounds": 0}, {"trials": 0}, {"honest_validators": 0}, {"grinding_bits": -1},
        {"scheme": "pow"}, {"scheme": "seed_chain", "grinding_bits": 1}, {"rng_seed": -1},
        {"rng_seed": 2**64}, {"rounds": 1.5},
    ])
    def test_invalid(self, kw):
        with pytest.raises(InvalidConfig):
            AttackSimConfig(**kw)


class TestSimulation:
    def test_seed_chain_unbiased(self):
        r = simulate_attack(AttackSimConfig("seed_chain", 0.3, rounds=1000, trials=100, rng_seed=7))
        assert r.total_rounds == 100_000
        assert r.stderr == pytest.approx(0.00145, abs=0.00002)
        assert abs(r.adversary_share - 0.3) <= 3 * r.stderr

    @pytest.mark.parametrize("scheme,g", [("seed_chain", 0), ("xor_accumulator", 0), ("xor_accumulator", 3)])
    def test_zero_stake(self, scheme, g):
        r = simulate_attack(AttackSimConfig(scheme, 0.0, rounds=200, trials=5, grinding_bits=g))
        assert r.adversary_share == 0.0 and r.max_consecutive_adversary == 0 and r.bias == 0.0

    def test_xor_grinding_hits_best_of_two(self):
        r = simulate_attack(AttackSimConfig("xor_accumulator", 0.3, rounds=1000, trials=100,
                                            grinding_bits=1, rng_seed=11))
        assert abs(r.ground_share - 0.51) <= 3 * r.ground_stderr
        assert r.bias > 0

    def test_determinism(self):
        cfg = AttackSimConfig("xor_accumulator", 0.4, rounds=300, trials=20, grinding_bits=2, rng_seed=99)
        assert simulate_attack(cfg) == simulate_attack(cfg)
        other = simulate_attack(AttackSimConfig("xor_accumulator", 0.4, rounds=300, trials=20,
                                                grinding_bits=2, rng_seed=100))
        assert other != simulate_attack(cfg)

    def test_thread_count_does_not_change_results(self, monkeypatch):
        cfg = AttackSimConfig("xor_accumulator", 0.3, rounds=200, trials=16, grinding_bits=1, rng_seed=5)
        monkeypatch.setenv("TRILEMMA_THREADS", "1")
        one = simulate_attack(cfg)
        monkeypatch.setenv("TRILEMMA_THREADS", "4")
        assert simulate_attack(cfg) == one

    def test_result_bounds(self):
        r = simulate_attack(AttackSimConfig("xor_accumulator", 0.6, rounds=50, trials=3, grinding_bits=2))
        assert 0 <= r.adversary_share <= 1
        assert r.max_consecutive_adversary <= 50
        row = r.to_row()
        assert {"scheme", "alpha", "grinding_bits", "rounds", "trials", "adversary_share", "bias",
                "stderr", "max_consecutive", "rng_seed"} <= set(row)

    def test_unbiased_in_nearly_all_seeded_runs(self):
        alphas = np.linspace(0.05, 0.9, 10)
        hits = runs = 0
        for seed in range(30):
            for alpha in alphas:
                r = simulate_attack(AttackSimConfig("seed_chain", float(alpha), rounds=200, trials=5,
                                                    rng_seed=seed))
                hits += abs(r.adversary_share - alpha) <= 4 * r.stderr
                runs += 1
        assert hits / runs >= 0.99

    def test_grinding_monotone_in_bits(self):
        shares = [simulate_attack(AttackSimConfig("xor_accumulator", 0.2, rounds=1000, trials=40,
                                                  grinding_bits=g, rng_seed=3)).adversary_share
                  for g in range(4)]
        assert shares == sorted(shares)

    def test_zero_bits_matches_seed_chain(self):
        a = simulate_attack(AttackSimConfig("seed_chain", 0.3, rounds=1000, trials=100, rng_seed=21))
        b = simulate_attack(AttackSimConfig("xor_accumulator", 0.3, rounds=1000, trials=100, rng_seed=22))
        z = (a.adversary_share - b.adversary_share) / math.hypot(a.stderr, b.stderr)
        assert abs(z) < 3.29  # two-sided 0.1%


class TestSweep:
    def test_zero(self):
        (r,) = sweep_attack(AttackSimConfig(rounds=100, trials=2), [0.0])
        assert r.adversary_share == 0.0

    def test_seed_chain_no_edge(self):
        for r in sweep_attack(AttackSimConfig("seed_chain", rounds=1000, trials=100, rng_seed=8), [0.1, 0.51]):
            assert abs(r.bias) <= 3 * r.stderr

    def test_seeds_are_xored_with_index(self):
        rs = sweep_attack(AttackSimConfig(rounds=10, trials=1, rng_seed=6), [0.1, 0.2, 0.3])
        assert [r.config.rng_seed for r in rs] == [6, 7, 4]

    def test_grinding_bias_significant(self):
        base = AttackSimConfig("xor_accumulator", rounds=1000, trials=100, rng_seed=13)
        (g0,) = sweep_attack(base, [0.3])
        (g1,) = sweep_attack(AttackSimConfig("xor_accumulator", rounds=1000, trials=100, rng_seed=13,
                                             grinding_bits=1), [0.3])
        z = (g1.bias - g0.bias) / math.hypot(g0.stderr, g1.stderr)
        assert z > 2.326

    def test_invalid_alpha(self):
        with pytest.raises(InvalidConfig, match="sweep entry 1"):
            sweep_attack(AttackSimConfig(), [0.1, 1.2])
