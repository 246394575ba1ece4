import numpy as np
import pytest

from hankelfill import (CONVERGED, SCHEDULE_EXHAUSTED, SWEEP_BUDGET, RankSchedule,
                        ScheduleExhaustedError, StoppingCriteria,
                        complete_with_rank_increment, default_rank_sequences,
                        default_stopping_criteria, init_model, mode_residuals,
                        pad_model, select_increment_mode)
from helpers import is_non_increasing, orthonormality_defect, planted_tucker, random_mask


class TestDefaultRankSequences:
    def test_doubling_to_32(self):
        sched = default_rank_sequences((32,))
        assert sched.sequences[0] == (1, 2, 4, 8, 16, 32)

    def test_singleton_mode(self):
        sched = default_rank_sequences((1, 5))
        assert sched.sequences[0] == (1,)

    def test_doubling_then_cap_225(self):
        sched = default_rank_sequences((225,))
        assert sched.sequences[0] == (1, 2, 4, 8, 16, 32, 64, 128, 225)

    def test_non_power_cap(self):
        sched = default_rank_sequences((3,))
        assert sched.sequences[0] == (1, 2, 3)


class TestRankSchedule:
    def test_rejects_non_increasing_sequence(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            RankSchedule(((1, 2, 2),))

    def test_cursor_tracking(self):
        sched = RankSchedule(((1, 2, 4), (1, 3)))
        assert sched.current_ranks() == (1, 1)
        assert sched.advance(0) == 2
        assert sched.current_ranks() == (2, 1)
        assert sched.has_headroom(0)
        assert sched.advance(0) == 4
        assert not sched.has_headroom(0)
        with pytest.raises(ScheduleExhaustedError):
            sched.advance(0)

    def test_copy_is_independent(self):
        sched = RankSchedule(((1, 2),))
        other = sched.copy()
        other.advance(0)
        assert sched.current_ranks() == (1,)


class TestModeResiduals:
    def test_zero_when_fit_is_exact(self):
        t = planted_tucker((5, 6, 4), (2, 2, 2), data_seed=0)
        q = random_mask(t.shape, 0.3, seed=1)
        factors = [np.eye(s, 2) for s in t.shape]
        values = mode_residuals(t, q, t, factors)
        assert values == [0.0, 0.0, 0.0]

    def test_identity_factors_give_plain_residual(self):
        rng = np.random.default_rng(2)
        t = rng.standard_normal((4, 5, 3))
        x = rng.standard_normal((4, 5, 3))
        q = random_mask(t.shape, 0.4, seed=3)
        factors = [np.eye(s) for s in t.shape]
        masked = float((((t - x) * q) ** 2).sum())
        for value in mode_residuals(t, q, x, factors):
            assert value == pytest.approx(masked, rel=1e-12)

    def test_matches_einsum_oracle(self):
        rng = np.random.default_rng(4)
        t = rng.standard_normal((5, 4, 6))
        x = rng.standard_normal((5, 4, 6))
        q = random_mask(t.shape, 0.5, seed=5)
        factors = [rng.standard_normal((5, 2)), rng.standard_normal((4, 3)),
                   rng.standard_normal((6, 2))]
        r = np.where(q, t - x, 0.0)
        u0, u1, u2 = factors
        oracle = [
            float((np.einsum("abc,bj,ck->ajk", r, u1, u2) ** 2).sum()),
            float((np.einsum("abc,ai,ck->ibk", r, u0, u2) ** 2).sum()),
            float((np.einsum("abc,ai,bj->ijc", r, u0, u1) ** 2).sum()),
        ]
        np.testing.assert_allclose(mode_residuals(t, q, x, factors), oracle, rtol=1e-10)


class TestSelectIncrementMode:
    def test_argmax_with_headroom(self):
        sched = RankSchedule(((1, 2), (1, 2), (1, 2)))
        assert select_increment_mode([5.0, 9.0, 2.0], sched) == 1

    def test_tie_break_lowest_index(self):
        sched = RankSchedule(((1, 2), (1, 2), (1, 2)))
        assert select_increment_mode([9.0, 9.0, 2.0], sched) == 0

    def test_saturated_mode_excluded(self):
        sched = RankSchedule(((1, 2), (1, 2), (1, 2)), cursors=[0, 1, 0])
        assert select_increment_mode([5.0, 9.0, 2.0], sched) == 0

    def test_all_saturated_raises(self):
        sched = RankSchedule(((1,), (2,)), cursors=[0, 0])
        with pytest.raises(ScheduleExhaustedError, match="exhausted"):
            select_increment_mode([1.0, 2.0], sched)

    def test_representability_guard_blocks_runaway_mode(self):
        # ranks (2, 1, 1): mode 0 already exceeds the product of the others,
        # so even with the largest residual it must not be grown again
        sched = RankSchedule(((1, 2, 4), (1, 2), (1, 2)), cursors=[1, 0, 0])
        assert select_increment_mode([100.0, 5.0, 2.0], sched) == 1

    def test_guard_falls_back_at_all_ones(self):
        sched = RankSchedule(((1, 2), (1, 2), (1, 2)))
        # at (1, 1, 1) every mode sits on the bound; plain argmax applies
        assert select_increment_mode([1.0, 5.0, 2.0], sched) == 1


class TestPadModel:
    def test_reconstruction_preserved(self):
        model = init_model((2, 2), (6, 7), seed=0)
        before = model.reconstruct()
        padded = pad_model(model, 0, 4, seed=1)
        np.testing.assert_allclose(padded.reconstruct(), before, atol=1e-12)

    def test_padded_factor_orthonormal(self):
        model = init_model((2, 3, 2), (6, 7, 5), seed=2)
        padded = pad_model(model, 1, 6, seed=3)
        assert padded.factors[1].shape == (7, 6)
        assert orthonormality_defect(padded.factors[1]) < 1e-10

    def test_existing_columns_untouched(self):
        model = init_model((1, 2), (4, 5), seed=4)
        padded = pad_model(model, 0, 2, seed=5)
        assert padded.factors[0].shape == (4, 2)
        np.testing.assert_array_equal(padded.factors[0][:, :1], model.factors[0])

    def test_core_zero_padded(self):
        model = init_model((2, 2), (6, 7), seed=6)
        padded = pad_model(model, 1, 3, seed=7)
        assert padded.core.shape == (2, 3)
        np.testing.assert_array_equal(padded.core[:, :2], model.core)
        np.testing.assert_array_equal(padded.core[:, 2], 0.0)

    def test_rank_bounds(self):
        model = init_model((2, 2), (6, 7), seed=8)
        with pytest.raises(ValueError, match="out of range"):
            pad_model(model, 0, 2, seed=9)  # not an increase
        with pytest.raises(ValueError, match="out of range"):
            pad_model(model, 0, 7, seed=9)  # exceeds rows


class TestCompleteWithRankIncrement:
    def test_planted_model_recovered(self):
        t = planted_tucker((8, 8, 8), (1, 3, 2), data_seed=10)
        q = random_mask(t.shape, 0.2, seed=11)
        criteria = default_stopping_criteria(t, q, epsilon_rel=1e-12, tol_rel=1e-10)
        result = complete_with_rank_increment(t, q, default_rank_sequences(t.shape),
                                              criteria, seed=5)
        assert result.status == CONVERGED
        assert all(r >= p for r, p in zip(result.terminal_ranks, (1, 3, 2)))
        x = result.model.reconstruct()
        hidden = ~q
        rel = np.linalg.norm((x - t)[hidden]) / np.linalg.norm(t[hidden])
        assert rel < 1e-4

    def test_generous_epsilon_returns_at_rank_one(self):
        t = planted_tucker((6, 6, 6), (2, 2, 2), data_seed=12)
        q = random_mask(t.shape, 0.1, seed=13)
        observed_energy = float(t[q] @ t[q])
        criteria = StoppingCriteria(epsilon=10 * observed_energy, tol=1e-9)
        result = complete_with_rank_increment(t, q, default_rank_sequences(t.shape),
                                              criteria, seed=0)
        assert result.status == CONVERGED
        assert result.terminal_ranks == (1, 1, 1)
        assert len(result.cost_trace) == 1  # initial cost already below epsilon

    def test_trace_monotone_across_increments(self):
        t = planted_tucker((7, 6, 5), (2, 2, 2), data_seed=14)
        q = random_mask(t.shape, 0.3, seed=15)
        criteria = default_stopping_criteria(t, q, epsilon_rel=1e-10, tol_rel=1e-8)
        result = complete_with_rank_increment(t, q, default_rank_sequences(t.shape),
                                              criteria, seed=1)
        assert result.rank_history  # at least one increment happened
        assert is_non_increasing(result.cost_trace)

    def test_ranks_nondecreasing_and_on_sequence(self):
        t = planted_tucker((7, 6, 5), (2, 2, 2), data_seed=16)
        q = random_mask(t.shape, 0.3, seed=17)
        schedule = default_rank_sequences(t.shape)
        criteria = default_stopping_criteria(t, q, epsilon_rel=1e-10, tol_rel=1e-8)
        result = complete_with_rank_increment(t, q, schedule, criteria, seed=2)
        ranks = [1, 1, 1]
        for _, mode, new_rank in result.rank_history:
            assert new_rank > ranks[mode]
            assert new_rank in schedule.sequences[mode]
            ranks[mode] = new_rank
        assert tuple(ranks) == result.terminal_ranks

    def test_increments_only_after_plateau(self):
        t = planted_tucker((7, 6, 5), (2, 2, 2), data_seed=18)
        q = random_mask(t.shape, 0.3, seed=19)
        criteria = default_stopping_criteria(t, q, epsilon_rel=1e-10, tol_rel=1e-8)
        result = complete_with_rank_increment(t, q, default_rank_sequences(t.shape),
                                              criteria, seed=3)
        costs = dict(result.cost_trace)
        for sweep, _, _ in result.rank_history:
            assert abs(costs[sweep] - costs[sweep - 1]) <= criteria.tol

    def test_schedule_exhausted_status(self):
        rng = np.random.default_rng(20)
        t = rng.standard_normal((6, 6, 6))  # full-rank noise, unreachable epsilon
        q = random_mask(t.shape, 0.2, seed=21)
        schedule = RankSchedule(((1, 2), (1, 2), (1, 2)))
        criteria = StoppingCriteria(epsilon=0.0, tol=1e-3, max_total_sweeps=500)
        result = complete_with_rank_increment(t, q, schedule, criteria, seed=4)
        assert result.status == SCHEDULE_EXHAUSTED
        assert result.terminal_ranks == (2, 2, 2)

    def test_sweep_budget_status(self):
        rng = np.random.default_rng(22)
        t = rng.standard_normal((6, 6, 6))
        q = random_mask(t.shape, 0.2, seed=23)
        criteria = StoppingCriteria(epsilon=0.0, tol=0.0, max_total_sweeps=5)
        result = complete_with_rank_increment(t, q, default_rank_sequences(t.shape),
                                              criteria, seed=5)
        assert result.status == SWEEP_BUDGET
        assert result.cost_trace[-1][0] == 5

    def test_input_schedule_not_mutated(self):
        t = planted_tucker((6, 6, 6), (2, 2, 2), data_seed=24)
        q = random_mask(t.shape, 0.3, seed=25)
        schedule = default_rank_sequences(t.shape)
        criteria = default_stopping_criteria(t, q, epsilon_rel=1e-8)
        complete_with_rank_increment(t, q, schedule, criteria, seed=6)
        assert schedule.current_ranks() == (1, 1, 1)

    def test_sequence_exceeding_mode_size_rejected(self):
        t = np.zeros((4, 4))
        q = np.ones((4, 4), bool)
        with pytest.raises(ValueError, match="tops out"):
            complete_with_rank_increment(t, q, RankSchedule(((1, 5), (1, 2))),
                                         StoppingCriteria(epsilon=0.0, tol=0.0), seed=0)
