"""
Summary statistics per configuration, and best-configuration selection within
a group (usually one preconditioner class).
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from precond_bench.analysis.profiles import DEFAULT_POINTS, PerformanceProfile, auc, build_profile
from precond_bench.analysis.records import RunRecord
from precond_bench.errors import EmptyRecordSetError
from precond_bench.types import Baseline, RunStatus

logger = logging.getLogger(__name__)

FAILURE_RATIO = 0.25
MAX_RATIO = 128.0


@dataclass(frozen=True)
class SummaryStats:
    label: str
    auc: float
    geo_mean: float
    success_rate: float
    parity: float
    ge2x: float
    ge4x: float
    ge8x: float
    problems: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def geo_mean(ratios: Sequence[float]) -> float:
    """Geometric mean with failures (ratio 0) counted as ``1/4`` and ratios capped at 128."""
    r = np.asarray(ratios, dtype=np.float64)
    if r.size == 0:
        raise EmptyRecordSetError("geometric mean of no ratios")
    r = np.where(r > 0, r, FAILURE_RATIO)
    r = np.minimum(r, MAX_RATIO)
    return float(np.exp(np.mean(np.log(r))))


def summary_stats(
    records: Sequence[RunRecord],
    baseline: Baseline = Baseline.CONTROL,
    include_generation: bool = False,
    label: Optional[str] = None,
    problems: Optional[Sequence[str]] = None,
    points: int = DEFAULT_POINTS,
) -> SummaryStats:
    """
    AUC, geometric mean, success rate and threshold fractions for one configuration.

    Raises:
        EmptyRecordSetError: no records
    """
    if not records:
        raise EmptyRecordSetError(f"No records for {label or 'configuration'}")
    profile = build_profile(records, baseline, include_generation, points, label, problems)
    failed_build = sum(1 for record in records if record.status is RunStatus.GENERATION_FAILURE)
    missing = 0 if problems is None else len(set(problems) - {record.matrix_id for record in records})
    total = len(records) + missing
    return SummaryStats(
        label=profile.label,
        auc=auc(profile),
        geo_mean=geo_mean(profile.ratios),
        success_rate=(total - failed_build - missing) / total,
        parity=profile.fraction_at(1.0),
        ge2x=profile.fraction_at(2.0),
        ge4x=profile.fraction_at(4.0),
        ge8x=profile.fraction_at(8.0),
        problems=profile.problems,
    )


def _problem_set(records_by_config: Mapping[str, Sequence[RunRecord]]) -> list[str]:
    return sorted({record.matrix_id for records in records_by_config.values() for record in records})


def single_best(
    records_by_config: Mapping[str, Sequence[RunRecord]],
    baseline: Baseline = Baseline.CONTROL,
    include_generation: bool = False,
    points: int = DEFAULT_POINTS,
) -> tuple[str, PerformanceProfile]:
    """
    The configuration with the largest AUC; ties go to the lexicographically smallest label.

    Problems are the union of matrices over the group; a configuration missing
    a matrix fails on it.
    """
    if not records_by_config:
        raise EmptyRecordSetError("No configurations to choose from")
    problems = _problem_set(records_by_config)
    best: Optional[tuple[float, str, PerformanceProfile]] = None
    for label in sorted(records_by_config):
        profile = build_profile(records_by_config[label], baseline, include_generation, points, label, problems)
        score = auc(profile)
        if best is None or score > best[0]:
            best = (score, label, profile)
    assert best is not None
    logger.debug(f"single best: {best[1]} (auc={best[0]:.4f})")
    return best[1], best[2]


def tuned_best(
    records_by_config: Mapping[str, Sequence[RunRecord]],
    baseline: Baseline = Baseline.CONTROL,
    include_generation: bool = False,
    points: int = DEFAULT_POINTS,
    label: str = "tuned",
) -> tuple[dict[str, str], PerformanceProfile]:
    """
    Per-matrix best configuration and the profile of those best ratios.

    Returns a mapping ``matrix_id -> config label`` (ties go to the smallest
    label) and the pooled profile.
    """
    if not records_by_config:
        raise EmptyRecordSetError("No configurations to choose from")
    problems = _problem_set(records_by_config)
    best_ratio = {matrix_id: 0.0 for matrix_id in problems}
    choice: dict[str, str] = {}
    for config in sorted(records_by_config):
        for record in records_by_config[config]:
            value = record.ratio(baseline, include_generation)
            if record.matrix_id not in choice or value > best_ratio[record.matrix_id]:
                best_ratio[record.matrix_id] = value
                choice[record.matrix_id] = config
    profile = PerformanceProfile.from_ratios(label, [best_ratio[m] for m in problems], points)
    return choice, profile


__all__ = ["SummaryStats", "geo_mean", "summary_stats", "single_best", "tuned_best", "FAILURE_RATIO", "MAX_RATIO"]
