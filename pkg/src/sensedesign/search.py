"""Worst-subset enumeration and minimax search over angle configurations.

The design objective is the worst (largest) pair-cosine sum S over all
K-column subsets; by the closed-form spectrum, maximizing S is the same as
maximizing the Gram condition number and minimizing sigma_min, so a single
enumeration serves all three views.

``minimax_grid_search`` minimizes that worst case over configurations.  The
objective is invariant under a common rotation and under relabeling, so the
first angle is pinned at 0 and the remaining n-1 angles are enumerated as
non-decreasing tuples on a uniform grid over [0, pi).  The non-decreasing
restriction is lossless and cuts the grid by about (n-1)!, which is what
makes n = 5 at the default density tractable.  The last two angles are
evaluated as one vectorized block per outer tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AngleSet,
    SubsetSelection,
    SpectralSummary,
    pair_cosine_sum,
    spectral_summary,
)

# hard ceiling on grid configurations actually evaluated
EVALUATION_GUARD = 1_000_000_000


class ResourceLimitError(RuntimeError):
    """Raised when a search would exceed the evaluation budget."""


@dataclass(frozen=True)
class WorstCaseReport:
    """Worst K-subset of one configuration, with its spectrum."""

    worst_subset: SubsetSelection
    objective: float
    summary: SpectralSummary
    subsets_evaluated: int


@dataclass(frozen=True)
class MinimaxSearchConfig:
    n: int
    k: int = 3
    grid_points_per_angle: int = 180
    refine_iterations: int = 200
    refine_shrink: float = 0.5
    seed: int = 0  # recorded in manifests; the search itself is deterministic

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"search needs n >= 3, got n={self.n}")
        if not 2 <= self.k <= self.n:
            raise ValueError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if self.grid_points_per_angle < 2:
            raise ValueError("grid_points_per_angle must be at least 2")
        if self.refine_iterations < 0:
            raise ValueError("refine_iterations must be nonnegative")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie strictly between 0 and 1")


def worst_subset(angles: AngleSet, k: int = 3) -> WorstCaseReport:
    """Enumerate all C(N, K) subsets; ties go to the lexicographically
    smallest index tuple (combinations are generated in that order and
    only strict improvements replace the incumbent)."""
    n = angles.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    best_idx: tuple[int, ...] | None = None
    best_s = -math.inf
    count = 0
    for idx in itertools.combinations(range(n), k):
        count += 1
        s = pair_cosine_sum(angles, idx)
        if s > best_s:
            best_s = s
            best_idx = idx
    sel = SubsetSelection(best_idx)
    return WorstCaseReport(
        worst_subset=sel,
        objective=best_s,
        summary=spectral_summary(angles, sel),
        subsets_evaluated=count,
    )


def worst_sigma_min(angles: AngleSet, k: int = 3) -> tuple[SubsetSelection, float]:
    """Subset minimizing the smallest singular value, and that value.

    sigma_min = sqrt(lambda_min) is strictly decreasing in the pair-cosine
    sum at fixed K, so this is the same subset worst_subset reports.
    """
    report = worst_subset(angles, k)
    return report.worst_subset, math.sqrt(report.summary.lambda_min)


def grid_evaluations(config: MinimaxSearchConfig) -> int:
    """Number of configurations the grid search will evaluate."""
    g = config.grid_points_per_angle
    return math.comb(g + config.n - 2, config.n - 1)


def minimax_grid_search(config: MinimaxSearchConfig) -> tuple[AngleSet, WorstCaseReport]:
    """Exhaustive minimax over the gauge-fixed, sorted angle grid.

    Returns the refined configuration and its worst-subset report.  The
    enumeration order (lexicographic over sorted tuples, row-major within
    each block) fixes tie-breaking, so results are reproducible.
    """
    n, k, g = config.n, config.k, config.grid_points_per_angle
    total = grid_evaluations(config)
    if total > EVALUATION_GUARD:
        raise ResourceLimitError(
            f"grid search for n={n} at {g} points/angle needs {total} "
            f"evaluations (budget {EVALUATION_GUARD}); lower the density or n"
        )

    grid = np.arange(g) * (math.pi / g)
    # T[i, j] = cos 2(grid_i - grid_j); every pair term is a lookup here
    diff = grid[:, None] - grid[None, :]
    table = np.cos(2.0 * diff)

    lower_mask = np.tril(np.ones((g, g), dtype=bool), k=-1)

    m = n - 2  # fixed angles per outer tuple: pinned 0 plus n-3 outer
    combos2 = list(itertools.combinations(range(m), k - 2))
    combos1 = list(itertools.combinations(range(m), k - 1)) if k - 1 <= m else []
    combos0 = list(itertools.combinations(range(m), k)) if k <= m else []

    best_val = math.inf
    best_tuple: tuple[int, ...] | None = None

    for outer in itertools.combinations_with_replacement(range(g), n - 3):
        fixed = (0,) + outer
        r0 = fixed[-1]
        length = g - r0
        rows = table[list(fixed)][:, r0:]  # (m, length)

        def fixed_pair_sum(combo: tuple[int, ...]) -> float:
            return sum(
                table[fixed[a], fixed[b]]
                for a, b in itertools.combinations(combo, 2)
            )

        # one fixed angle short of a subset on each free axis
        block = None
        for combo in combos2:
            base = fixed_pair_sum(combo)
            rs = rows[list(combo)].sum(axis=0) if combo else np.zeros(length)
            w = (rs + base)[:, None] + rs[None, :]
            block = w if block is None else np.maximum(block, w)
        block = block + table[r0:, r0:]

        if combos1:
            g1 = None
            for combo in combos1:
                vals = fixed_pair_sum(combo) + rows[list(combo)].sum(axis=0)
                g1 = vals if g1 is None else np.maximum(g1, vals)
            np.maximum(block, g1[:, None], out=block)
            np.maximum(block, g1[None, :], out=block)

        if combos0:
            smax = max(fixed_pair_sum(c) for c in combos0)
            np.maximum(block, smax, out=block)

        block[lower_mask[:length, :length]] = math.inf
        flat = int(block.argmin())
        val = float(block.flat[flat])
        if val < best_val:
            u, v = divmod(flat, length)
            best_val = val
            best_tuple = outer + (r0 + u, r0 + v)

    coarse = AngleSet((0.0,) + tuple(grid[t] for t in best_tuple))
    refined = local_refine(
        coarse,
        k,
        iterations=config.refine_iterations,
        shrink=config.refine_shrink,
        initial_step=math.pi / g,
    )
    return refined, worst_subset(refined, k)


def local_refine(
    angles: AngleSet,
    k: int = 3,
    iterations: int = 200,
    shrink: float = 0.5,
    initial_step: float | None = None,
) -> AngleSet:
    """Coordinate descent on the worst-subset objective.

    Each sweep tries +-step on every angle and keeps strict improvements;
    the step shrinks after a sweep with no improvement.  The objective
    never increases, but tied plateaus (where any single-angle move leaves
    some maximizing subset untouched) are fixed points.
    """
    if not 1 <= k <= angles.n:
        raise ValueError(f"need 1 <= k <= {angles.n}, got k={k}")
    step = math.pi / 180.0 if initial_step is None else float(initial_step)
    if step <= 0.0:
        raise ValueError("initial_step must be positive")
    current = list(angles.angles)
    best = worst_subset(AngleSet(current), k).objective
    for _ in range(iterations):
        improved = False
        for i in range(len(current)):
            for delta in (step, -step):
                trial = current.copy()
                trial[i] = trial[i] + delta
                obj = worst_subset(AngleSet(trial), k).objective
                if obj < best:
                    best = obj
                    current = [a for a in AngleSet(trial).angles]
                    improved = True
        if not improved:
            step *= shrink
            if step < 1e-12:
                break
    return AngleSet(current)
