"""Monte Carlo studies driven by the worst-conditioned subset.

Two settings share the same geometric core:

* linear estimation y = A_S^T x + w on a K-column subset, where the
  recovery error obeys ||x_hat - x|| <= ||w|| / sigma_min(A_S); the
  simulation averages the squared error on the worst subset;
* source monitoring from log-RSS readings of ring sensors, where the
  triple with the worst Fisher-information condition number is activated
  and the source is recovered by maximum likelihood.

Randomness policy: every trial draws from its own PCG64 stream seeded by
SeedSequence((seed, ...indices...)), so runs are reproducible and trial
order (or parallel execution) cannot change results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from numpy.random import Generator, SeedSequence, default_rng
from scipy.optimize import minimize

from .core import (
    RANK_TOL_SCALE,
    AngleSet,
    SubsetSelection,
    angles_to_matrix,
    as_subset,
)
from .search import WorstCaseReport, worst_subset

MIN_SENSOR_DISTANCE = 1e-12


class SingularSubsetError(ValueError):
    """The chosen subset's Gram matrix is numerically rank deficient."""


class DegenerateGeometryError(ValueError):
    """Active sensors are collinear; the source is not identifiable."""


# ---------------------------------------------------------------------------
# linear estimation on the worst subset


@dataclass(frozen=True)
class EstimationScenario:
    angles: AngleSet
    k: int = 3
    signal: tuple[float, float] = (9.0, 9.0)
    noise_std: float = 1.0
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.angles.n:
            raise ValueError(f"need 1 <= k <= {self.angles.n}, got k={self.k}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be positive")


def _subset_matrix(angles: AngleSet, sel: SubsetSelection) -> np.ndarray:
    return angles_to_matrix(angles)[:, list(sel.indices)]


def _gram_or_raise(angles: AngleSet, sel: SubsetSelection) -> np.ndarray:
    a = _subset_matrix(angles, sel)
    gram = a @ a.T
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= RANK_TOL_SCALE * sel.k:
        raise SingularSubsetError(
            f"subset {sel.indices} is rank deficient (lambda_min={eigs[0]:.3e})"
        )
    return gram


def least_squares_estimate(
    angles: AngleSet, subset: SubsetSelection | Sequence[int], y: Sequence[float]
) -> np.ndarray:
    """Least-squares recovery x_hat = (A_S A_S^T)^-1 A_S y."""
    sel = as_subset(subset)
    obs = np.asarray(y, dtype=float)
    if obs.shape != (sel.k,):
        raise ValueError(f"y must have shape ({sel.k},), got {obs.shape}")
    gram = _gram_or_raise(angles, sel)
    return np.linalg.solve(gram, _subset_matrix(angles, sel) @ obs)


def error_bound_check(
    angles: AngleSet, subset: SubsetSelection | Sequence[int], noise: Sequence[float]
) -> tuple[float, float]:
    """Recovery error for a given noise draw, with its bound ||w||/sigma_min."""
    sel = as_subset(subset)
    w = np.asarray(noise, dtype=float)
    if w.shape != (sel.k,):
        raise ValueError(f"noise must have shape ({sel.k},), got {w.shape}")
    gram = _gram_or_raise(angles, sel)
    err_vec = np.linalg.solve(gram, _subset_matrix(angles, sel) @ w)
    error = float(np.linalg.norm(err_vec))
    sigma_min = math.sqrt(float(np.linalg.eigvalsh(gram)[0]))
    bound = float(np.linalg.norm(w)) / sigma_min
    assert error <= bound + 1e-10
    return error, bound


def expected_worst_case_mse(angles: AngleSet, k: int = 3, noise_std: float = 1.0) -> float:
    """Closed-form E||x_hat - x||^2 = noise_std^2 * trace(G^-1) on the worst subset."""
    report = worst_subset(angles, k)
    lo, hi = report.summary.lambda_min, report.summary.lambda_max
    if lo <= RANK_TOL_SCALE * k:
        return math.inf
    return noise_std**2 * k / (lo * hi)


@dataclass(frozen=True)
class EstimationResult:
    mse: float
    std_error: float
    expected_mse: float
    report: WorstCaseReport
    trials: int
    seed: int


def simulate_worst_case_mse(scenario: EstimationScenario) -> EstimationResult:
    """Average squared recovery error on the worst-conditioned subset."""
    report = worst_subset(scenario.angles, scenario.k)
    sel = report.worst_subset
    gram = _gram_or_raise(scenario.angles, sel)
    a = _subset_matrix(scenario.angles, sel)
    recover = np.linalg.solve(gram, a)  # x_hat = recover @ y
    x = np.asarray(scenario.signal, dtype=float)
    clean = a.T @ x
    sq_errors = np.empty(scenario.trials)
    for t in range(scenario.trials):
        rng = default_rng(SeedSequence((scenario.seed, t)))
        w = scenario.noise_std * rng.standard_normal(sel.k)
        x_hat = recover @ (clean + w)
        sq_errors[t] = float(np.sum((x_hat - x) ** 2))
    mse = float(sq_errors.mean())
    se = float(sq_errors.std(ddof=1) / math.sqrt(scenario.trials)) if scenario.trials > 1 else 0.0
    return EstimationResult(
        mse=mse,
        std_error=se,
        expected_mse=expected_worst_case_mse(scenario.angles, scenario.k, scenario.noise_std),
        report=report,
        trials=scenario.trials,
        seed=scenario.seed,
    )


# ---------------------------------------------------------------------------
# log-RSS monitoring


@dataclass(frozen=True)
class RssScenario:
    """Ring of log-RSS sensors around a roughly known source location."""

    sensor_positions: tuple[tuple[float, float], ...]
    source: tuple[float, float] = (0.0, 0.0)
    sensor_radius: float = 1.0
    amplitude: float = 1.0
    path_loss: float = 2.0
    shadow_std: float = 1.0
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.sensor_radius <= 0:
            raise ValueError("sensor_radius must be positive")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if self.path_loss <= 0:
            raise ValueError("path_loss must be positive")
        if self.shadow_std < 0:
            raise ValueError("shadow_std must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        pos = tuple((float(p[0]), float(p[1])) for p in self.sensor_positions)
        if not pos:
            raise ValueError("at least one sensor position is required")
        z = np.asarray(self.source, dtype=float)
        for i, p in enumerate(pos):
            d = float(np.linalg.norm(np.asarray(p) - z))
            if d < self.sensor_radius - 1e-9:
                raise ValueError(
                    f"sensor {i} at distance {d:.6g} lies inside the radius-"
                    f"{self.sensor_radius:.6g} ring around the source"
                )
        object.__setattr__(self, "sensor_positions", pos)

    @property
    def n(self) -> int:
        return len(self.sensor_positions)


def ring_positions(
    angles: AngleSet, radius: float = 1.0, center: tuple[float, float] = (0.0, 0.0)
) -> tuple[tuple[float, float], ...]:
    """Sensor placements on a circle, using the pre-normalization angles."""
    cx, cy = float(center[0]), float(center[1])
    return tuple(
        (cx + radius * math.cos(a), cy + radius * math.sin(a)) for a in angles.raw
    )


def rss_sample(scenario: RssScenario, rng: Generator | None = None) -> np.ndarray:
    """One draw of log-RSS readings: ln A - path_loss * ln distance + noise."""
    if rng is None:
        rng = default_rng(SeedSequence(scenario.seed))
    pos = np.asarray(scenario.sensor_positions, dtype=float)
    z = np.asarray(scenario.source, dtype=float)
    dist = np.linalg.norm(pos - z, axis=1)
    if np.any(dist < MIN_SENSOR_DISTANCE):
        raise DegenerateGeometryError("a sensor coincides with the source")
    clean = math.log(scenario.amplitude) - scenario.path_loss * np.log(dist)
    return clean + scenario.shadow_std * rng.standard_normal(len(dist))


@dataclass(frozen=True)
class FimSummary:
    matrix: np.ndarray
    lambda_min: float
    lambda_max: float
    condition: float
    prefactor: float


def _fim_matrix(scenario: RssScenario, indices: Sequence[int]) -> np.ndarray:
    pos = np.asarray(scenario.sensor_positions, dtype=float)[list(indices)]
    z = np.asarray(scenario.source, dtype=float)
    rel = pos - z
    d2 = np.sum(rel**2, axis=1)
    mat = (rel[:, :, None] * rel[:, None, :] / d2[:, None, None] ** 2).sum(axis=0)
    return 0.5 * (mat + mat.T)


def fim(
    scenario: RssScenario,
    subset: SubsetSelection | Sequence[int] | None = None,
    prefactor: float | None = None,
    convention: str = "natural",
) -> FimSummary:
    """Fisher information of the source location from the active sensors.

    The geometry term is sum (x_i - z)(x_i - z)^T / ||x_i - z||^4.  The
    scale is path_loss^2 / shadow_std^2 for log-RSS in natural log units
    ("natural"), or divided by ln(10)^2 when readings are in decibel-like
    base-10 units ("log10").  An explicit prefactor overrides both.
    """
    if subset is None:
        indices: tuple[int, ...] = tuple(range(scenario.n))
    else:
        sel = as_subset(subset)
        if sel.indices and sel.indices[-1] >= scenario.n:
            raise IndexError(
                f"subset index {sel.indices[-1]} out of range for {scenario.n} sensors"
            )
        indices = sel.indices
    if prefactor is None:
        if convention not in ("natural", "log10"):
            raise ValueError(f"convention must be 'natural' or 'log10', got {convention!r}")
        if scenario.shadow_std == 0:
            raise ValueError("prefactor is undefined at shadow_std=0; pass it explicitly")
        prefactor = scenario.path_loss**2 / scenario.shadow_std**2
        if convention == "log10":
            prefactor /= math.log(10.0) ** 2
    if prefactor <= 0:
        raise ValueError("prefactor must be positive")
    mat = prefactor * _fim_matrix(scenario, indices)
    mid = 0.5 * (mat[0, 0] + mat[1, 1])
    half_gap = math.hypot(0.5 * (mat[0, 0] - mat[1, 1]), mat[0, 1])
    lo = max(mid - half_gap, 0.0)
    hi = mid + half_gap
    cond = math.inf if lo <= RANK_TOL_SCALE * max(hi, 1.0) else hi / lo
    return FimSummary(matrix=mat, lambda_min=lo, lambda_max=hi, condition=cond, prefactor=prefactor)


def worst_fim_subset(scenario: RssScenario, k: int = 3) -> tuple[SubsetSelection, float]:
    """Active subset with the largest FIM condition number (lexicographic ties)."""
    if not 2 <= k <= scenario.n:
        raise ValueError(f"need 2 <= k <= {scenario.n}, got k={k}")
    best: tuple[int, ...] | None = None
    best_cond = -math.inf
    for idx in itertools.combinations(range(scenario.n), k):
        cond = fim(scenario, idx, prefactor=1.0).condition
        if cond > best_cond:
            best_cond = cond
            best = idx
    return SubsetSelection(best), best_cond


# ---------------------------------------------------------------------------
# maximum-likelihood source localization

GRID_POINTS_PER_AXIS = 101
SEARCH_RADIUS_FACTOR = 2.0


@dataclass(frozen=True)
class LocateResult:
    estimate: np.ndarray
    residual: float
    on_boundary: bool


def _residual_grid(
    samples: np.ndarray, pos: np.ndarray, points: np.ndarray, amplitude: float, beta: float
) -> np.ndarray:
    d = np.linalg.norm(points[:, None, :] - pos[None, :, :], axis=2)
    with np.errstate(divide="ignore"):
        mu = math.log(amplitude) - beta * np.log(d)
    return np.sum((samples[None, :] - mu) ** 2, axis=1)


def ml_locate(
    scenario: RssScenario,
    samples: Sequence[float],
    active: SubsetSelection | Sequence[int],
) -> LocateResult:
    """Maximum-likelihood source estimate from the active sensors' readings.

    Coarse 101x101 grid over the disc of radius 2 * sensor_radius around
    the nominal source, then simplex refinement from the best cell.  The
    refined residual never exceeds the best coarse-grid residual.
    """
    sel = as_subset(active)
    if sel.k < 3:
        raise ValueError(f"need at least 3 active sensors, got {sel.k}")
    if sel.indices[-1] >= scenario.n:
        raise IndexError(
            f"active index {sel.indices[-1]} out of range for {scenario.n} sensors"
        )
    obs = np.asarray(samples, dtype=float)
    if obs.shape != (scenario.n,):
        raise ValueError(f"samples must have shape ({scenario.n},), got {obs.shape}")

    pos = np.asarray(scenario.sensor_positions, dtype=float)[list(sel.indices)]
    spread = pos - pos.mean(axis=0)
    svals = np.linalg.svd(spread, compute_uv=False)
    if svals[-1] <= 1e-9 * svals[0]:
        raise DegenerateGeometryError(f"active sensors {sel.indices} are collinear")

    z = np.asarray(scenario.source, dtype=float)
    radius = SEARCH_RADIUS_FACTOR * scenario.sensor_radius
    axis = np.linspace(-radius, radius, GRID_POINTS_PER_AXIS)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([gx.ravel(), gy.ravel()]) + z
    off = points - z
    in_disc = np.einsum("ij,ij->i", off, off) <= radius**2
    candidates = points[in_disc]

    obs_active = obs[list(sel.indices)]
    res = _residual_grid(obs_active, pos, candidates, scenario.amplitude, scenario.path_loss)
    start = candidates[int(np.argmin(res))]
    best_grid_residual = float(res.min())

    big = 1e30

    def objective(p: np.ndarray) -> float:
        off = p - z
        r2 = float(off @ off)
        if r2 > radius**2:
            return big * (1.0 + r2)
        d = np.linalg.norm(pos - p, axis=1)
        if np.any(d < MIN_SENSOR_DISTANCE):
            return big
        mu = math.log(scenario.amplitude) - scenario.path_loss * np.log(d)
        return float(np.sum((obs_active - mu) ** 2))

    opt = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-30, "maxiter": 2000, "maxfev": 4000},
    )
    est, residual = (opt.x, float(opt.fun))
    if residual > best_grid_residual:  # simplex never made progress; keep the grid point
        est, residual = start, best_grid_residual
    cell = 2.0 * radius / (GRID_POINTS_PER_AXIS - 1)
    on_boundary = float(np.linalg.norm(est - z)) >= radius - cell
    return LocateResult(estimate=np.asarray(est, dtype=float), residual=residual, on_boundary=on_boundary)


# ---------------------------------------------------------------------------
# monitoring sweep


@dataclass(frozen=True)
class MonitoringPoint:
    snr_db: float
    noise_std: float
    mse: float
    std_error: float
    mse_db: float
    worst_subset: tuple[int, ...]


@dataclass(frozen=True)
class MonitoringResult:
    points: tuple[MonitoringPoint, ...]
    metadata: dict


def simulate_monitoring(
    scenario: RssScenario,
    snr_grid_db: Sequence[float],
    trials: int | None = None,
) -> MonitoringResult:
    """Localization MSE versus SNR with the worst FIM triple active.

    The noise level for each point is set from SNR = 10 log10(P_s / sigma^2)
    where P_s is the mean squared noiseless log-RSS over the ring.  When the
    scenario makes every noiseless reading zero (unit amplitude at unit
    distance), P_s degenerates; the reference power falls back to 1 and the
    metadata says so.
    """
    if trials is None:
        trials = scenario.trials
    if trials < 1:
        raise ValueError("trials must be positive")
    snrs = [float(s) for s in snr_grid_db]
    if not snrs:
        raise ValueError("snr_grid_db must be nonempty")

    sel, _ = worst_fim_subset(scenario, k=3)
    z = np.asarray(scenario.source, dtype=float)
    pos = np.asarray(scenario.sensor_positions, dtype=float)
    dist = np.linalg.norm(pos - z, axis=1)
    clean = math.log(scenario.amplitude) - scenario.path_loss * np.log(dist)
    signal_power = float(np.mean(clean**2))
    if signal_power > 1e-30:
        reference = "mean_squared_noiseless_log_rss"
        p_ref = signal_power
    else:
        reference = "unit_log_power"
        p_ref = 1.0

    points = []
    for pi, snr in enumerate(snrs):
        sigma = math.sqrt(p_ref * 10.0 ** (-snr / 10.0))
        scn = replace(scenario, shadow_std=sigma)
        sq = np.empty(trials)
        for t in range(trials):
            rng = default_rng(SeedSequence((scenario.seed, pi, t)))
            samples = rss_sample(scn, rng)
            located = ml_locate(scn, samples, sel)
            sq[t] = float(np.sum((located.estimate - z) ** 2))
        mse = float(sq.mean())
        se = float(sq.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        mse_db = 10.0 * math.log10(mse) if mse > 0 else -math.inf
        points.append(
            MonitoringPoint(
                snr_db=snr,
                noise_std=sigma,
                mse=mse,
                std_error=se,
                mse_db=mse_db,
                worst_subset=sel.indices,
            )
        )
    metadata = {
        "snr_definition": "snr_db = 10*log10(reference_power / sigma^2)",
        "snr_reference": reference,
        "reference_power": p_ref,
        "noise_generator": "numpy PCG64 via SeedSequence((seed, point_index, trial_index))",
        "active_subset": list(sel.indices),
        "trials": trials,
    }
    return MonitoringResult(points=tuple(points), metadata=metadata)
