"""Outer relay-selection searches checked against exhaustive enumeration."""
import numpy as np
import pytest

from conftest import make_instance
from ehrelay.errors import DomainError, GuardError
from ehrelay.gp import ScaSettings
from ehrelay.model import SelectionMatrix
from ehrelay.selection import (
    ALL_INFEASIBLE, OK, BbSettings, BpsoSettings, ProblemContext, bb_optimize, bpso_optimize,
    energy_screen, exhaustive_optimize, sigmoid, steady_iteration, utility_bound,
)
import ehrelay.selection.bb as bb_module

FAST_SCA = ScaSettings(tolerance=1e-3, max_iterations=10)
FULL_SEARCH = BbSettings(stop_at_binary_root=False)


def context_for(seed, L=2, B=2, **changes):
    params, ch, re = make_instance(L=L, B=B, seed=seed, **changes)
    return ProblemContext(ch, re, params, FAST_SCA)


class TestSigmoid:

    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_symmetry(self):
        x = np.linspace(-6, 6, 101)
        np.testing.assert_allclose(sigmoid(x) + sigmoid(-x), 1.0, atol=1e-12)


class TestSteadyIteration:

    def test_first_index_of_final_value(self):
        assert steady_iteration([1.0, 2.0, 3.0, 3.0]) == 2
        assert steady_iteration([5.0]) == 0
        assert steady_iteration([]) == 0


class TestExhaustive:

    def test_single_cell_two_candidates(self):
        context = context_for(1, L=1, B=1)
        result = exhaustive_optimize(context, "max-sum")
        assert result.evaluations == 2
        assert result.status == OK

    def test_picks_best_candidate(self):
        context = context_for(2)
        result = exhaustive_optimize(context, "max-sum")
        scores = [context.evaluate(SelectionMatrix.from_int(c, 2, 2), "max-sum").utility for c in range(16)]
        assert result.utility == max(scores)
        assert result.selection.to_int() == int(np.argmax(scores))

    def test_trace_non_decreasing(self):
        result = exhaustive_optimize(context_for(3), "max-min")
        assert all(b >= a for a, b in zip(result.trace, result.trace[1:]))

    def test_guard(self):
        with pytest.raises(GuardError) as info:
            exhaustive_optimize(context_for(0, L=4, B=5), "max-sum")
        assert info.value.cells == 20 and info.value.limit == 16

    @pytest.mark.slow
    def test_three_by_three_enumerates_512(self):
        result = exhaustive_optimize(context_for(4, L=3, B=3), "max-sum")
        assert result.evaluations == 512
        assert result.iterations == 512

    def test_all_infeasible(self):
        context = context_for(5, B_init=(0.0,))
        result = exhaustive_optimize(context, "max-sum")
        assert result.status == ALL_INFEASIBLE
        assert result.utility == float("-inf")


class TestBpso:
    settings = BpsoSettings(particle_count=4, max_iterations=6, seed=7)

    def test_global_best_never_decreases(self):
        result = bpso_optimize(context_for(6), "max-sum", self.settings)
        assert all(b >= a for a, b in zip(result.trace, result.trace[1:]))
        assert result.feasible

    def test_deterministic_under_seed(self):
        first = bpso_optimize(context_for(6), "max-sum", self.settings)
        second = bpso_optimize(context_for(6), "max-sum", self.settings)
        assert first.trace == second.trace
        np.testing.assert_array_equal(first.selection.eps, second.selection.eps)

    def test_bounded_by_exhaustive(self):
        context = context_for(7)
        best = exhaustive_optimize(context, "max-sum").utility
        assert bpso_optimize(context, "max-sum", self.settings).utility <= best

    def test_stall_window_stops_early(self):
        settings = BpsoSettings(particle_count=3, max_iterations=50, stall_window=2, seed=1)
        result = bpso_optimize(context_for(8, L=1, B=1), "max-sum", settings)
        assert result.iterations < 50

    def test_all_infeasible(self):
        result = bpso_optimize(context_for(5, B_init=(0.0,)), "max-sum", self.settings)
        assert result.status == ALL_INFEASIBLE

    def test_inertia_schedule(self):
        settings = BpsoSettings(max_iterations=10)
        assert settings.inertia(0) == pytest.approx(0.9)
        assert settings.inertia(10) == pytest.approx(0.2)

    def test_invalid_settings(self):
        with pytest.raises(DomainError):
            BpsoSettings(particle_count=0)

    @pytest.mark.slow
    def test_close_to_exhaustive_on_random_instances(self):
        hits = 0
        for seed in range(50):
            context = context_for(100 + seed)
            best = exhaustive_optimize(context, "max-sum").utility
            found = bpso_optimize(context, "max-sum", BpsoSettings(seed=seed)).utility
            hits += found >= 0.95 * best
        assert hits >= 45

    @pytest.mark.slow
    def test_global_best_settles_within_thirty_iterations(self):
        settled = 0
        for seed in range(50):
            result = bpso_optimize(context_for(400 + seed, L=3, B=4), "max-sum", BpsoSettings(seed=seed))
            assert result.steady_iteration == steady_iteration(result.trace)
            settled += result.steady_iteration <= 30
        assert settled >= 40


class TestBranchAndBound:

    @pytest.mark.parametrize("seed,kind", [(11, "max-sum"), (12, "max-min"), (13, "max-sum")])
    def test_matches_exhaustive(self, seed, kind):
        context = context_for(seed)
        expected = exhaustive_optimize(context, kind).utility
        result = bb_optimize(context, kind, FULL_SEARCH)
        assert result.utility == pytest.approx(expected, rel=1e-6)

    def test_node_count_bounded_by_full_tree(self):
        result = bb_optimize(context_for(14), "max-sum", FULL_SEARCH)
        assert 1 <= result.nodes <= 2 ** (4 + 1) - 1

    def test_without_relaxation(self):
        context = context_for(15)
        expected = exhaustive_optimize(context, "max-sum").utility
        result = bb_optimize(context, "max-sum", BbSettings(use_relaxation=False))
        assert result.utility == pytest.approx(expected, rel=1e-6)

    def test_guard(self):
        with pytest.raises(GuardError):
            bb_optimize(context_for(0, L=5, B=5), "max-sum")

    def test_bound_dominates_every_completion(self):
        context = context_for(16)
        bound = utility_bound(context, np.full((2, 2), np.nan), "max-sum")
        for code in range(16):
            assert context.evaluate(SelectionMatrix.from_int(code, 2, 2), "max-sum").utility <= bound

    def test_energy_screen_rejects_empty_batteries(self):
        context = context_for(17, B_init=(0.0,))
        assert not energy_screen(context, np.full((2, 2), np.nan))
        assert energy_screen(context_for(17), np.full((2, 2), np.nan))

    def test_binary_root_relaxation_returns_at_once(self, monkeypatch):
        context = context_for(18)
        best = exhaustive_optimize(context, "max-sum")
        assert best.feasible
        monkeypatch.setattr(bb_module, "solve_relaxation",
                            lambda ctx, pattern, kind: best.selection.eps.astype(float))
        result = bb_optimize(context, "max-sum")
        assert result.nodes == 1
        assert result.iterations == 1
        np.testing.assert_array_equal(result.selection.eps, best.selection.eps)
        assert result.utility == pytest.approx(best.utility, rel=1e-12)

    def test_full_search_ignores_binary_root(self, monkeypatch):
        context = context_for(19)
        expected = exhaustive_optimize(context, "max-sum").utility
        monkeypatch.setattr(bb_module, "solve_relaxation", lambda ctx, pattern, kind: np.zeros((2, 2)))
        result = bb_optimize(context, "max-sum", FULL_SEARCH)
        assert result.nodes > 1
        assert result.utility == pytest.approx(expected, rel=1e-6)

    @pytest.mark.slow
    def test_matches_exhaustive_on_random_instances(self):
        for seed in range(50):
            for kind in ("max-sum", "max-min"):
                context = context_for(200 + seed)
                expected = exhaustive_optimize(context, kind).utility
                assert bb_optimize(context, kind, FULL_SEARCH).utility == pytest.approx(expected, rel=1e-6)
