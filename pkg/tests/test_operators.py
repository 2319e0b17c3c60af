import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pitsched.block_model import BlockModel, make_block
from pitsched.evaluation import deterministic_npv, penalty, precedence_feasible
from pitsched.operators import (
    MutationConfig,
    greedy_randomized_init,
    period_swap_mutation,
    truncate_trailing_periods,
)
from pitsched.synthetic import make_random_dag_model

from .conftest import chain_model


class TestInit:
    def test_zero_capacity_leaves_everything_unmined(self, pit):
        zero = BlockModel(pit.blocks, pit.predecessors, pit.num_periods, pit.discount_rate,
                          np.zeros_like(pit.resource_limits))
        x = greedy_randomized_init(zero, None, np.random.default_rng(0))
        assert np.all(x == -1) and penalty(x, zero) == 0.0

    def test_single_block_assignment_rate(self):
        T, runs = 3, 4000
        m = chain_model([5.0], num_periods=T)
        periods = [int(greedy_randomized_init(m, None, np.random.default_rng(s))[0]) for s in range(runs)]
        rate = np.mean([t >= 0 for t in periods])
        p = 1 - 0.5**T
        assert abs(rate - p) < 4 * np.sqrt(p * (1 - p) / runs)
        # the first pick happens in period t with probability 0.5^(t+1)
        share0 = periods.count(0) / runs
        assert abs(share0 - 0.5) < 4 * np.sqrt(0.25 / runs)

    def test_chain_ancestor_comes_first(self):
        m = chain_model([-0.5, 5.0], num_periods=3, limits=[[1.0, 1.0, 2.0]])
        hits = 0
        for s in range(1000):
            x = greedy_randomized_init(m, None, np.random.default_rng(s))
            if x[1] >= 0:
                hits += 1
                assert 0 <= x[0] <= x[1]
            assert penalty(x, m) == 0.0
        assert hits > 0

    @pytest.mark.parametrize("seed", range(20))
    def test_feasible_on_random_dags(self, seed):
        m = make_random_dag_model(120, num_periods=4, arc_prob=0.05, capacity_fraction=0.2, seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(10):
            x = greedy_randomized_init(m, None, rng)
            assert penalty(x, m) == 0.0
            assert precedence_feasible(x, m)

    def test_deterministic(self, pit):
        a = greedy_randomized_init(pit, None, np.random.default_rng(42))
        b = greedy_randomized_init(pit, None, np.random.default_rng(42))
        assert np.array_equal(a, b)


class TestTruncation:
    def test_trailing_negative_period_removed(self):
        m = chain_model([3.0, 1.0, 1.0], num_periods=3)
        vals = np.array([3.0, -2.0, 1.0])
        out = truncate_trailing_periods(np.array([0, 1, 2]), m, vals)
        # period 2 is worth +1, so nothing is cut
        assert out.tolist() == [0, 1, 2]
        out = truncate_trailing_periods(np.array([0, 1, 1]), m, vals)
        assert out.tolist() == [0, -1, -1]

    def test_empty_trailing_period_skipped(self):
        m = chain_model([1.0, 1.0], num_periods=3)
        out = truncate_trailing_periods(np.array([0, 1]), m, np.array([2.0, -1.0]))
        assert out.tolist() == [0, -1]

    def test_zero_value_period_kept(self):
        m = chain_model([1.0, 1.0], num_periods=2)
        out = truncate_trailing_periods(np.array([0, 1]), m, np.array([-1.0, 0.0]))
        assert out.tolist() == [0, 1]

    @given(st.lists(st.floats(-10, 10), min_size=2, max_size=8), st.integers(0, 2**31))
    @settings(max_examples=100)
    def test_never_lowers_npv(self, vals, seed):
        n = len(vals)
        m = chain_model([1.0] * n, num_periods=3)
        blocks = tuple(make_block(i, 1.0, 0.0, mining_cost=-v, resource_use=(1.0,)) for i, v in enumerate(vals))
        m = BlockModel(blocks, m.predecessors, 3, 0.1, m.resource_limits)
        x = np.sort(np.random.default_rng(seed).integers(0, 3, size=n))
        out = truncate_trailing_periods(x, m, m.values)
        assert deterministic_npv(out, m) >= deterministic_npv(x, m) - 1e-12
        assert precedence_feasible(out, m)


class TestMutation:
    def test_zero_probability_is_identity(self, pit):
        x = greedy_randomized_init(pit, None, np.random.default_rng(1))
        y = period_swap_mutation(x, pit, MutationConfig(prob=0.0), np.random.default_rng(2))
        assert np.array_equal(x, y) and y is not x

    def test_ore_at_first_period_with_mined_successor_stays(self):
        m = chain_model([5.0, 5.0], num_periods=2)
        rng = np.random.default_rng(0)
        for _ in range(200):
            y = period_swap_mutation(np.array([0, 1]), m, MutationConfig(prob=1.0), rng)
            assert y[0] == 0

    def test_literal_guard_blocks_moves_past_unmined_successor(self):
        m = chain_model([5.0, 5.0], num_periods=3)
        rng = np.random.default_rng(0)
        moved = {False: 0, True: 0}
        for relaxed in (False, True):
            cfg = MutationConfig(prob=1.0, allow_unmined_successors=relaxed)
            for _ in range(200):
                y = period_swap_mutation(np.array([2, -1]), m, cfg, rng)
                moved[relaxed] += int(y[0] not in (2, -1))
                assert precedence_feasible(y, m)
        assert moved[False] == 0 and moved[True] > 0

    def test_unmined_block_can_reenter(self):
        m = chain_model([5.0], num_periods=4)
        rng = np.random.default_rng(0)
        seen = {int(period_swap_mutation(np.array([-1]), m, MutationConfig(prob=1.0), rng)[0])
                for _ in range(200)}
        assert seen == {0, 1, 2, 3}

    def test_precedence_and_candidate_sets_on_random_dag(self, dag_data):
        model, _, _ = dag_data
        rng = np.random.default_rng(7)
        cfg = MutationConfig(prob=0.3)
        parents = [greedy_randomized_init(model, None, rng) for _ in range(20)]
        ore = model.ore_mask
        for i in range(2000):
            x = parents[i % len(parents)]
            y = period_swap_mutation(x, model, cfg, rng)
            assert precedence_feasible(y, model)
            changed = np.flatnonzero(x != y)
            for b in changed:
                if x[b] >= 0 and y[b] >= 0:
                    assert (y[b] < x[b]) if ore[b] else (y[b] > x[b])
            parents[i % len(parents)] = y

    def test_deterministic(self, pit):
        x = greedy_randomized_init(pit, None, np.random.default_rng(1))
        cfg = MutationConfig(prob=0.2)
        a = period_swap_mutation(x, pit, cfg, np.random.default_rng(3))
        b = period_swap_mutation(x, pit, cfg, np.random.default_rng(3))
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("kwargs", [{"prob": 1.5}, {"max_attempts": 0}])
    def test_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            MutationConfig(**kwargs)
