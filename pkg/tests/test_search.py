import itertools
import math

import numpy as np
import pytest

from sensedesign import (
    AngleSet,
    EVALUATION_GUARD,
    MinimaxSearchConfig,
    ResourceLimitError,
    baseline_semicircle,
    design_optimal,
    grid_evaluations,
    local_refine,
    minimax_grid_search,
    pair_cosine_sum,
    worst_sigma_min,
    worst_subset,
)


def brute_worst(angles: AngleSet, k: int):
    best = None
    for idx in itertools.combinations(range(angles.n), k):
        s = pair_cosine_sum(angles, idx)
        if best is None or s > best[0]:
            best = (s, idx)
    return best


class TestWorstSubset:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            a = AngleSet(rng.uniform(0, math.pi, 7))
            report = worst_subset(a, 3)
            s, idx = brute_worst(a, 3)
            assert report.objective == s
            assert report.worst_subset.indices == idx
            assert report.subsets_evaluated == math.comb(7, 3)

    def test_objective_is_exact_pair_sum(self):
        a = design_optimal(9)
        report = worst_subset(a)
        assert report.objective == pair_cosine_sum(a, report.worst_subset)

    def test_tie_breaks_lexicographically(self):
        a = AngleSet([0.0, 0.0, math.pi / 2, math.pi / 2])
        report = worst_subset(a, 3)
        # all four triples tie at S = -1
        assert report.worst_subset.indices == (0, 1, 2)
        assert report.objective == pytest.approx(-1.0, abs=1e-15)

    def test_invalid_k(self):
        a = AngleSet([0.0, 1.0])
        with pytest.raises(ValueError):
            worst_subset(a, 3)
        with pytest.raises(ValueError):
            worst_subset(a, 0)


class TestWorstSigmaMin:
    def test_paired_right_angles(self):
        sel, sigma = worst_sigma_min(AngleSet([0.0, 0.0, math.pi / 2, math.pi / 2]), 3)
        assert sel.indices == (0, 1, 2)
        assert sigma == pytest.approx(1.0, abs=1e-12)

    def test_consistent_with_worst_subset(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = AngleSet(rng.uniform(0, math.pi, 6))
            sel, sigma = worst_sigma_min(a, 3)
            report = worst_subset(a, 3)
            assert sel.indices == report.worst_subset.indices
            assert sigma == pytest.approx(math.sqrt(report.summary.lambda_min), abs=1e-15)


class TestGridSearch:
    def test_n3_hits_analytic_floor(self):
        angles, report = minimax_grid_search(
            MinimaxSearchConfig(n=3, grid_points_per_angle=60)
        )
        assert report.objective == pytest.approx(-1.5, abs=1e-9)
        assert report.objective >= -1.5 - 1e-12

    def test_n4_matches_optimal(self):
        _, report = minimax_grid_search(MinimaxSearchConfig(n=4, grid_points_per_angle=60))
        assert report.objective == pytest.approx(-1.0, abs=1e-9)

    def test_block_evaluator_agrees_with_enumeration(self):
        # tiny grid; replay the same sorted enumeration through worst_subset
        g, n = 12, 4
        config = MinimaxSearchConfig(n=n, grid_points_per_angle=g, refine_iterations=0)
        _, report = minimax_grid_search(config)
        grid = [i * math.pi / g for i in range(g)]
        best = math.inf
        for tup in itertools.combinations_with_replacement(range(g), n - 1):
            angles = AngleSet([0.0] + [grid[t] for t in tup])
            best = min(best, worst_subset(angles, 3).objective)
        assert report.objective == pytest.approx(best, abs=1e-10)

    def test_gauge_fixing_lossless(self):
        angles, report = minimax_grid_search(MinimaxSearchConfig(n=4, grid_points_per_angle=30))
        for delta in (0.3, 1.1, 2.9):
            shifted = worst_subset(angles.shifted(delta), 3).objective
            assert shifted == pytest.approx(report.objective, abs=1e-10)

    def test_resource_guard(self):
        big = MinimaxSearchConfig(n=6, grid_points_per_angle=180)
        assert grid_evaluations(big) > EVALUATION_GUARD
        with pytest.raises(ResourceLimitError):
            minimax_grid_search(big)

    def test_evaluation_count_formula(self):
        config = MinimaxSearchConfig(n=5, grid_points_per_angle=180)
        assert grid_evaluations(config) == math.comb(183, 4)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MinimaxSearchConfig(n=2)
        with pytest.raises(ValueError):
            MinimaxSearchConfig(n=4, k=5)
        with pytest.raises(ValueError):
            MinimaxSearchConfig(n=4, refine_shrink=1.5)


class TestLocalRefine:
    def test_never_increases(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            a = AngleSet(rng.uniform(0, math.pi, 5))
            before = worst_subset(a, 3).objective
            after = worst_subset(local_refine(a, 3, iterations=40), 3).objective
            assert after <= before + 1e-15

    def test_optimal_designs_are_fixed_points(self):
        for n in range(3, 11):
            d = design_optimal(n)
            before = worst_subset(d, 3).objective
            after = worst_subset(local_refine(d, 3, iterations=60), 3).objective
            assert after <= before + 1e-15
            assert after >= before - 1e-9

    def test_semicircle7_tied_plateau(self):
        # every angle move leaves >= 4 of the 7 maximizing triples untouched,
        # so strict coordinate descent cannot leave this configuration
        semi = baseline_semicircle(7)
        before = worst_subset(semi, 3).objective
        refined = local_refine(semi, 3, iterations=80)
        after = worst_subset(refined, 3).objective
        assert after == pytest.approx(before, abs=1e-15)

    def test_escapes_coarse_grid_point(self):
        # a perturbed three-angle set should descend toward the -1.5 floor
        start = AngleSet([0.0, math.pi / 3 + 0.05, 2 * math.pi / 3 - 0.07])
        before = worst_subset(start, 3).objective
        after = worst_subset(local_refine(start, 3, iterations=120, initial_step=0.05), 3).objective
        assert after < before
        assert after == pytest.approx(-1.5, abs=1e-6)

    def test_rejects_bad_args(self):
        a = AngleSet([0.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            local_refine(a, 4)
        with pytest.raises(ValueError):
            local_refine(a, 3, initial_step=0.0)
