"""Angle sets, unit-column matrices and 2x2 Gram spectra.

A sensing direction in the plane is a unit column (cos t, sin t) and only
its line matters, so angles live on [0, pi).  For a subset of K columns the
Gram matrix G = A A^T is 2x2 with trace K, and its eigenvalues have the
closed form

    lambda_pm = K/2 +- sqrt(K + 2*S) / 2,
    S = sum_{j<l} cos 2(t_l - t_j),

because K + 2*S = |sum_j exp(2i t_j)|^2 is the squared resultant of the
doubled angles.  Everything downstream (worst-subset search, condition
numbers, error bounds) is built on this pair (K, S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# lambda_min at or below this fraction of K counts as rank deficient
RANK_TOL_SCALE = 1e-12


def normalize_angle(theta: float) -> float:
    """Reduce an angle to the line representative in [0, pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta, math.pi)
    if r < 0.0:
        r += math.pi
    if r >= math.pi:  # fmod(-eps, pi) + pi can round up to pi itself
        r = 0.0
    return r


@dataclass(frozen=True)
class AngleSet:
    """Ordered sensing angles, normalized to [0, pi) at construction.

    ``raw`` keeps the angles as given, before mod-pi reduction.  Designs
    that place physical sensors on a full circle store the placement angle
    there; the normalized values are what every spectral quantity uses.
    """

    angles: tuple[float, ...]
    raw: tuple[float, ...] = field(default=())

    def __init__(self, angles: Iterable[float], raw: Iterable[float] | None = None):
        given = tuple(float(a) for a in angles)
        if not given:
            raise ValueError("AngleSet needs at least one angle")
        normalized = tuple(normalize_angle(a) for a in given)
        raw_t = given if raw is None else tuple(float(a) for a in raw)
        if len(raw_t) != len(normalized):
            raise ValueError("raw angles must match angles in length")
        for a in raw_t:
            if not math.isfinite(a):
                raise ValueError(f"raw angle must be finite, got {a!r}")
        object.__setattr__(self, "angles", normalized)
        object.__setattr__(self, "raw", raw_t)

    @property
    def n(self) -> int:
        return len(self.angles)

    def shifted(self, delta: float) -> "AngleSet":
        """Common rotation of every angle (re-normalized)."""
        return AngleSet([a + delta for a in self.angles])


@dataclass(frozen=True)
class SubsetSelection:
    """Strictly increasing column indices of a chosen submatrix."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int]):
        idx = tuple(int(i) for i in indices)
        if any(i < 0 for i in idx):
            raise ValueError(f"subset indices must be nonnegative, got {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"subset indices must be strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def as_subset(subset: SubsetSelection | Sequence[int]) -> SubsetSelection:
    if isinstance(subset, SubsetSelection):
        return subset
    return SubsetSelection(subset)


def _check_range(angles: AngleSet, subset: SubsetSelection) -> None:
    if subset.indices and subset.indices[-1] >= angles.n:
        raise IndexError(
            f"subset index {subset.indices[-1]} out of range for {angles.n} angles"
        )


def angles_to_matrix(angles: AngleSet) -> np.ndarray:
    """2xN matrix whose i-th column is (cos t_i, sin t_i)."""
    th = np.asarray(angles.angles)
    return np.vstack([np.cos(th), np.sin(th)])


def pair_cosine_sum(angles: AngleSet, subset: SubsetSelection | Sequence[int]) -> float:
    """S = sum over index pairs j < l of cos 2(t_l - t_j).

    Ranges over [-K/2, K(K-1)/2]; the lower bound holds because
    K + 2*S is a squared resultant and cannot be negative.
    """
    sel = as_subset(subset)
    _check_range(angles, sel)
    th = angles.angles
    idx = sel.indices
    k = len(idx)
    s = 0.0
    for j in range(k):
        tj = th[idx[j]]
        for l in range(j + 1, k):
            s += math.cos(2.0 * (th[idx[l]] - tj))
    return s


def _eigenvalues_from_pair_sum(k: float, s: float) -> tuple[float, float]:
    radicand = k + 2.0 * s
    if radicand < 0.0:  # only reachable by rounding; exact value is >= 0
        radicand = 0.0
    r = math.sqrt(radicand)
    lo = 0.5 * (k - r)
    hi = 0.5 * (k + r)
    if lo < 0.0:
        lo = 0.0
    return lo, hi


def gram_eigenvalues_closed_form(
    angles: AngleSet, subset: SubsetSelection | Sequence[int]
) -> tuple[float, float]:
    """(lambda_min, lambda_max) of the subset Gram matrix, via (K, S)."""
    sel = as_subset(subset)
    s = pair_cosine_sum(angles, sel)
    return _eigenvalues_from_pair_sum(float(sel.k), s)


def gram_eigenvalues_direct(
    angles: AngleSet, subset: SubsetSelection | Sequence[int]
) -> tuple[float, float]:
    """Same spectrum, from the assembled 2x2 Gram matrix.

    Independent route used to cross-check the closed form: accumulate
    G = sum a_i a_i^T and eigendecompose via trace/determinant.
    """
    sel = as_subset(subset)
    _check_range(angles, sel)
    g00 = g01 = g11 = 0.0
    for i in sel.indices:
        c = math.cos(angles.angles[i])
        s = math.sin(angles.angles[i])
        g00 += c * c
        g01 += c * s
        g11 += s * s
    mid = 0.5 * (g00 + g11)
    half_gap = math.hypot(0.5 * (g00 - g11), g01)
    lo = mid - half_gap
    hi = mid + half_gap
    if lo < 0.0:
        lo = 0.0
    return lo, hi


@dataclass(frozen=True)
class SpectralSummary:
    """Spectral figures of one K-column submatrix."""

    pair_cosine_sum: float
    lambda_min: float
    lambda_max: float
    gram_condition: float
    matrix_condition: float


def spectral_summary(
    angles: AngleSet, subset: SubsetSelection | Sequence[int]
) -> SpectralSummary:
    """Eigenvalues and condition numbers for one subset.

    A subset whose lambda_min is at or below RANK_TOL_SCALE * K is treated
    as rank deficient and reports infinite condition numbers.
    """
    sel = as_subset(subset)
    s = pair_cosine_sum(angles, sel)
    lo, hi = _eigenvalues_from_pair_sum(float(sel.k), s)
    if lo <= RANK_TOL_SCALE * sel.k:
        gram_cond = math.inf
    else:
        gram_cond = hi / lo
    return SpectralSummary(
        pair_cosine_sum=s,
        lambda_min=lo,
        lambda_max=hi,
        gram_condition=gram_cond,
        matrix_condition=math.sqrt(gram_cond),
    )
