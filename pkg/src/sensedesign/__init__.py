"""Worst-case conditioning of planar sensing matrices: designs, search, simulation."""

__version__ = "0.1.0"

from .core import (
    RANK_TOL_SCALE,
    AngleSet,
    SpectralSummary,
    SubsetSelection,
    angles_to_matrix,
    gram_eigenvalues_closed_form,
    gram_eigenvalues_direct,
    normalize_angle,
    pair_cosine_sum,
    spectral_summary,
)
from .designs import (
    SCHEMES,
    baseline_circle,
    baseline_semicircle,
    build_design,
    design_even,
    design_large_odd,
    design_optimal,
    design_small_odd,
)
from .search import (
    EVALUATION_GUARD,
    MinimaxSearchConfig,
    ResourceLimitError,
    WorstCaseReport,
    grid_evaluations,
    local_refine,
    minimax_grid_search,
    worst_sigma_min,
    worst_subset,
)
from .simulate import (
    DegenerateGeometryError,
    EstimationResult,
    EstimationScenario,
    FimSummary,
    LocateResult,
    MonitoringPoint,
    MonitoringResult,
    RssScenario,
    SingularSubsetError,
    error_bound_check,
    expected_worst_case_mse,
    fim,
    least_squares_estimate,
    ml_locate,
    ring_positions,
    rss_sample,
    simulate_monitoring,
    simulate_worst_case_mse,
    worst_fim_subset,
)

__all__ = [
    "__version__",
    "RANK_TOL_SCALE",
    "AngleSet",
    "SpectralSummary",
    "SubsetSelection",
    "angles_to_matrix",
    "gram_eigenvalues_closed_form",
    "gram_eigenvalues_direct",
    "normalize_angle",
    "pair_cosine_sum",
    "spectral_summary",
    "SCHEMES",
    "baseline_circle",
    "baseline_semicircle",
    "build_design",
    "design_even",
    "design_large_odd",
    "design_optimal",
    "design_small_odd",
    "EVALUATION_GUARD",
    "MinimaxSearchConfig",
    "ResourceLimitError",
    "WorstCaseReport",
    "grid_evaluations",
    "local_refine",
    "minimax_grid_search",
    "worst_sigma_min",
    "worst_subset",
    "DegenerateGeometryError",
    "EstimationResult",
    "EstimationScenario",
    "FimSummary",
    "LocateResult",
    "MonitoringPoint",
    "MonitoringResult",
    "RssScenario",
    "SingularSubsetError",
    "error_bound_check",
    "expected_worst_case_mse",
    "fim",
    "least_squares_estimate",
    "ml_locate",
    "ring_positions",
    "rss_sample",
    "simulate_monitoring",
    "simulate_worst_case_mse",
    "worst_fim_subset",
]
