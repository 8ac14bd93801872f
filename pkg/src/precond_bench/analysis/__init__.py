"""Cost models, run records and aggregate analytics."""

from precond_bench.analysis.costs import (
    direct_cost_baseline,
    elimination_tree,
    generation_cost,
    symbolic_column_counts,
    total_work,
)
from precond_bench.analysis.profiles import PerformanceProfile, auc, build_profile
from precond_bench.analysis.records import RunRecord, append_records, load_records
from precond_bench.analysis.stats import SummaryStats, geo_mean, single_best, summary_stats, tuned_best

__all__ = [
    "total_work",
    "generation_cost",
    "elimination_tree",
    "symbolic_column_counts",
    "direct_cost_baseline",
    "RunRecord",
    "append_records",
    "load_records",
    "PerformanceProfile",
    "build_profile",
    "auc",
    "SummaryStats",
    "geo_mean",
    "summary_stats",
    "single_best",
    "tuned_best",
]
