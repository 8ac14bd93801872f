"""
Report emission: summary table, profile curves, best-configuration comparisons.

Files land in ``<output>/report-<mode>/``:

* ``summary.csv`` with one row per configuration (``precond [ordering]``);
* ``profiles.csv`` with the sampled curves in long format;
* ``class_best.csv`` and ``tuned_choices.csv`` for single-best and tuned-best
  selection per preconditioner class;
* ``profile_<class>.svg`` and ``profiles_best.svg`` line plots.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import pandas as pd

from precond_bench.analysis.profiles import DEFAULT_POINTS, PerformanceProfile, build_profile
from precond_bench.analysis.profiles import auc as profile_auc
from precond_bench.analysis.records import RunRecord
from precond_bench.analysis.stats import single_best, summary_stats, tuned_best
from precond_bench.errors import EmptyRecordSetError, MissingBaselineError
from precond_bench.harness.svg import write_profiles_svg
from precond_bench.logger import log_benchmark_operation
from precond_bench.types import Baseline, ReportMode, RunStatus

logger = logging.getLogger(__name__)

UNKNOWN_GENERATION_CLASSES = frozenset({"sspai", "lu"})
SUMMARY_COLUMNS = [
    "label",
    "precond_class",
    "auc",
    "geo_mean",
    "success_rate",
    "parity",
    "ge2x",
    "ge4x",
    "ge8x",
    "problems",
    "equivalent_to_control",
]

_TNS_UNIT_ONE_TERM = re.compile(r"^tns\(m=1,alpha=unit\)$")
_TNS_REMAINDER_ONE_TERM = re.compile(r"^tns-remainder\(m=1,")


def equivalent_to_control(precond_label: str) -> bool:
    """TNS with one term and unit alpha (or any one-term remainder series) does no better than no preconditioner."""
    return bool(_TNS_UNIT_ONE_TERM.match(precond_label) or _TNS_REMAINDER_ONE_TERM.match(precond_label))


@dataclass
class ReportResult:
    mode: ReportMode
    output_dir: Path
    summary: pd.DataFrame
    class_best: pd.DataFrame
    files: list[Path] = field(default_factory=list)


def _eligible(records: Sequence[RunRecord], mode: ReportMode) -> list[RunRecord]:
    kept = [r for r in records if r.status is not RunStatus.INGEST_FAILURE]
    if mode.include_generation:
        skipped = sorted({r.precond_class for r in kept if r.precond_class in UNKNOWN_GENERATION_CLASSES})
        if skipped:
            logger.info(f"{mode.value}: skipping classes without a generation cost: {', '.join(skipped)}")
        kept = [r for r in kept if r.precond_class not in UNKNOWN_GENERATION_CLASSES]
    if not kept:
        raise EmptyRecordSetError(f"No run records usable for {mode.value}")
    return kept


def _check_baselines(records: Sequence[RunRecord], baseline: Baseline) -> None:
    missing = [r for r in records if (r.control_work if baseline is Baseline.CONTROL else r.direct_work) is None]
    if missing:
        first = missing[0]
        raise MissingBaselineError(
            f"{len(missing)} record(s) lack a {baseline.value} baseline, e.g. {first.matrix_id} / {first.config_label}"
        )


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text)


def _curve_frame(profile: PerformanceProfile, kind: str, precond_class: str) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "curve": profile.label,
            "kind": kind,
            "precond_class": precond_class,
            "log2_x": profile.log2_x,
            "x": profile.x,
            "y": profile.y,
        }
    )


@log_benchmark_operation("report")
def make_report(
    records: Sequence[RunRecord],
    mode: Union[ReportMode, str],
    output_dir: Union[str, Path],
    points: int = DEFAULT_POINTS,
    svg: bool = True,
) -> ReportResult:
    """
    Write the report files for ``mode`` and return the tables.

    Raises:
        MissingBaselineError: a record lacks the baseline the mode compares against
        EmptyRecordSetError: nothing left to report
    """
    mode = ReportMode(mode)
    baseline = mode.baseline
    include_generation = mode.include_generation
    records = _eligible(records, mode)
    _check_baselines(records, baseline)

    out = Path(output_dir) / f"report-{mode.value}"
    out.mkdir(parents=True, exist_ok=True)
    problems = sorted({r.matrix_id for r in records})

    by_config: dict[str, list[RunRecord]] = defaultdict(list)
    config_class: dict[str, str] = {}
    for record in records:
        by_config[record.config_label].append(record)
        config_class[record.config_label] = record.precond_class

    rows = []
    curves = []
    profiles_by_class: dict[str, list[PerformanceProfile]] = defaultdict(list)
    for label in sorted(by_config):
        group = by_config[label]
        stats = summary_stats(group, baseline, include_generation, label=label, problems=problems, points=points)
        rows.append(
            {
                **stats.to_dict(),
                "precond_class": config_class[label],
                "equivalent_to_control": equivalent_to_control(group[0].precond_label),
            }
        )
        profile = build_profile(group, baseline, include_generation, points, label, problems)
        profiles_by_class[config_class[label]].append(profile)
        curves.append(_curve_frame(profile, "config", config_class[label]))
    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    best_rows = []
    choice_rows = []
    best_profiles = []
    for precond_class in sorted(profiles_by_class):
        group = {label: by_config[label] for label in by_config if config_class[label] == precond_class}
        single_label, single_profile = single_best(group, baseline, include_generation, points)
        choices, tuned_profile = tuned_best(group, baseline, include_generation, points, label=f"{precond_class} tuned")
        single_profile = PerformanceProfile(
            label=f"{precond_class} single: {single_label}",
            ratios=single_profile.ratios,
            log2_x=single_profile.log2_x,
            y=single_profile.y,
        )
        best_profiles.extend([single_profile, tuned_profile])
        curves.append(_curve_frame(single_profile, "single_best", precond_class))
        curves.append(_curve_frame(tuned_profile, "tuned_best", precond_class))
        best_rows.append(
            {
                "precond_class": precond_class,
                "single_best": single_label,
                "single_best_auc": profile_auc(single_profile),
                "tuned_best_auc": profile_auc(tuned_profile),
                "configurations": len(group),
            }
        )
        choice_rows.extend(
            {"precond_class": precond_class, "matrix_id": matrix_id, "config": config}
            for matrix_id, config in sorted(choices.items())
        )
    class_best = pd.DataFrame(best_rows)

    files = [out / "summary.csv", out / "profiles.csv", out / "class_best.csv", out / "tuned_choices.csv"]
    summary.to_csv(files[0], index=False)
    pd.concat(curves, ignore_index=True).to_csv(files[1], index=False)
    class_best.to_csv(files[2], index=False)
    pd.DataFrame(choice_rows, columns=["precond_class", "matrix_id", "config"]).to_csv(files[3], index=False)

    if svg:
        for precond_class, class_profiles in sorted(profiles_by_class.items()):
            files.append(
                write_profiles_svg(
                    class_profiles, out / f"profile_{_slug(precond_class)}.svg", title=f"{precond_class} ({mode.value})"
                )
            )
        files.append(write_profiles_svg(best_profiles, out / "profiles_best.svg", title=f"best per class ({mode.value})"))

    logger.info(f"Report {mode.value}: {len(summary)} configurations, {len(problems)} problems -> {out}")
    return ReportResult(mode=mode, output_dir=out, summary=summary, class_best=class_best, files=files)


__all__ = ["make_report", "ReportResult", "equivalent_to_control", "UNKNOWN_GENERATION_CLASSES"]
