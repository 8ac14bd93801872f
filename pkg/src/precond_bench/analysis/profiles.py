"""
Performance profiles over work-reduction factors and their area under the curve.

A profile answers, for each speedup threshold ``t``, which fraction of the
problems were solved with at least ``t`` times less work than the baseline.
Thresholds are sampled uniformly in ``log2`` over ``[2^-2, 2^7]``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from precond_bench.analysis.records import RunRecord
from precond_bench.errors import EmptyRecordSetError
from precond_bench.types import Baseline, Vector

logger = logging.getLogger(__name__)

LOG2_MIN = -2.0
LOG2_MAX = 7.0
DEFAULT_POINTS = 512


def profile_grid(points: int = DEFAULT_POINTS) -> Vector:
    """``log2`` thresholds, endpoints included."""
    if points < 2:
        raise ValueError("A profile grid needs at least two points")
    return np.linspace(LOG2_MIN, LOG2_MAX, points)


@dataclass(frozen=True, eq=False)
class PerformanceProfile:
    """Sampled step curve; ``ratios`` holds one factor per problem, 0 for failures."""

    label: str
    ratios: Vector
    log2_x: Vector
    y: Vector

    @classmethod
    def from_ratios(cls, label: str, ratios: Sequence[float], points: int = DEFAULT_POINTS) -> "PerformanceProfile":
        r = np.asarray(ratios, dtype=np.float64)
        if r.size == 0:
            raise EmptyRecordSetError(f"{label}: no problems to profile")
        log2_x = profile_grid(points)
        y = np.mean(r[None, :] >= np.exp2(log2_x)[:, None], axis=1)
        return cls(label=label, ratios=r, log2_x=log2_x, y=y)

    @property
    def x(self) -> Vector:
        return np.exp2(self.log2_x)

    @property
    def problems(self) -> int:
        return int(self.ratios.size)

    def fraction_at(self, threshold: float) -> float:
        """Exact fraction of problems with ratio ``>= threshold`` (not read off the grid)."""
        return float(np.mean(self.ratios >= threshold))


def build_profile(
    records: Sequence[RunRecord],
    baseline: Baseline = Baseline.CONTROL,
    include_generation: bool = False,
    points: int = DEFAULT_POINTS,
    label: Optional[str] = None,
    problems: Optional[Sequence[str]] = None,
) -> PerformanceProfile:
    """
    Profile of one configuration's records, one problem per ``matrix_id``.

    When ``problems`` is given, matrices without a record count as failures.

    Raises:
        EmptyRecordSetError: no records and no problems
        MissingBaselineError: a record has no value for ``baseline``
    """
    by_matrix = {record.matrix_id: record.ratio(baseline, include_generation) for record in records}
    if problems is not None:
        ratios = [by_matrix.get(matrix_id, 0.0) for matrix_id in problems]
    else:
        ratios = [by_matrix[matrix_id] for matrix_id in sorted(by_matrix)]
    if label is None:
        label = records[0].config_label if records else ""
    return PerformanceProfile.from_ratios(label, ratios, points)


def auc(profile: PerformanceProfile) -> float:
    """Trapezoid area in ``log2`` threshold space, normalized by the width so ``y == 1`` scores 1."""
    width = float(profile.log2_x[-1] - profile.log2_x[0])
    return float(trapezoid(profile.y, profile.log2_x)) / width


__all__ = [
    "PerformanceProfile",
    "build_profile",
    "auc",
    "profile_grid",
    "LOG2_MIN",
    "LOG2_MAX",
    "DEFAULT_POINTS",
]
