"""Tests for run records, performance profiles and summary statistics."""

import numpy as np
import pytest
from pydantic import ValidationError

from precond_bench.analysis.profiles import PerformanceProfile, auc, build_profile, profile_grid
from precond_bench.analysis.records import RunRecord, append_records, iter_records, load_records
from precond_bench.analysis.stats import geo_mean, single_best, summary_stats, tuned_best
from precond_bench.errors import EmptyRecordSetError, MissingBaselineError
from precond_bench.types import Baseline, RunStatus


def piecewise_profile(fn) -> PerformanceProfile:
    log2_x = profile_grid(10)
    return PerformanceProfile(label="fixture", ratios=np.ones(1), log2_x=log2_x, y=np.array([fn(x) for x in log2_x]))


@pytest.fixture
def table_records(make_record):
    """Five problems: ratios 2, 4, 8, failure, 0.5 against a control of 1000."""
    return [
        make_record("m1", work=500),
        make_record("m2", work=250),
        make_record("m3", work=125),
        make_record("m4", work=None, status=RunStatus.MAX_ITERS),
        make_record("m5", work=2000),
    ]


@pytest.mark.unit
class TestRunRecord:
    def test_converged_needs_work(self, make_record):
        with pytest.raises(ValidationError):
            make_record("m", work=None, status=RunStatus.CONVERGED)

    def test_generation_failure_carries_no_work(self):
        with pytest.raises(ValidationError):
            RunRecord(
                matrix_id="m",
                ordering_label="natural",
                precond_label="ic(0)",
                precond_class="ic",
                status=RunStatus.GENERATION_FAILURE,
                iters=3,
                seed=1,
                tol=1e-10,
            )

    def test_unknown_fields_rejected(self, make_record):
        data = make_record("m").model_dump()
        data["extra"] = 1
        with pytest.raises(ValidationError):
            RunRecord.model_validate(data)

    def test_key_and_label(self, make_record):
        record = make_record("m", precond_label="sgs(1)", ordering_label="rcm")
        assert record.key == ("m", "rcm", "sgs(1)", 1, 1e-10)
        assert record.config_label == "sgs(1) [rcm]"

    def test_ratios(self, make_record):
        assert make_record("m", work=250).ratio(Baseline.CONTROL) == 4.0
        assert make_record("m", work=None, status=RunStatus.BREAKDOWN).ratio(Baseline.CONTROL) == 0.0
        failed = make_record("m", work=None, status=RunStatus.GENERATION_FAILURE)
        assert failed.ratio(Baseline.CONTROL) == 0.0

    def test_ratio_with_generation(self, make_record):
        record = make_record("m", work=500, generation_cost=500)
        assert record.ratio(Baseline.CONTROL, include_generation=True) == 1.0
        unknown = make_record("m", generation_cost=None)
        with pytest.raises(ValueError):
            unknown.ratio(Baseline.CONTROL, include_generation=True)

    def test_missing_baseline(self, make_record):
        with pytest.raises(MissingBaselineError):
            make_record("m").ratio(Baseline.DIRECT)
        assert make_record("m", direct_work=5000).ratio(Baseline.DIRECT) == 10.0


@pytest.mark.unit
class TestRecordFiles:
    def test_append_and_load(self, tmp_path, make_record):
        records = [make_record("a"), make_record("b", status=RunStatus.MAX_ITERS, work=None)]
        assert append_records(tmp_path / "records.jsonl", records) == 2
        loaded = load_records(tmp_path)
        assert loaded == records

    def test_truncated_final_line_skipped(self, tmp_path, make_record):
        path = tmp_path / "records.jsonl"
        append_records(path, [make_record("a"), make_record("b")])
        with path.open("a") as handle:
            handle.write('{"matrix_id": "c", "ordering_la')
        assert [record.matrix_id for record in iter_records(path)] == ["a", "b"]

    def test_corrupt_middle_line_raises(self, tmp_path, make_record):
        path = tmp_path / "records.jsonl"
        path.write_text("not json\n" + make_record("a").model_dump_json() + "\n")
        with pytest.raises(ValueError):
            list(iter_records(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_records(tmp_path / "nowhere")


@pytest.mark.unit
class TestProfiles:
    def test_grid(self):
        grid = profile_grid()
        assert grid.size == 512
        assert grid[0] == -2.0
        assert grid[-1] == 7.0

    def test_auc_all_solved_beyond_range(self):
        assert auc(PerformanceProfile.from_ratios("a", [128.0, 200.0])) == pytest.approx(1.0, abs=1e-12)

    def test_auc_all_failed(self):
        assert auc(PerformanceProfile.from_ratios("a", [0.0, 0.0])) == 0.0

    def test_auc_half(self):
        assert auc(PerformanceProfile.from_ratios("a", [128.0, 0.0])) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize(
        "fn, expected",
        [
            (lambda x: (x + 2.0) / 9.0, 0.5),
            (lambda x: min(1.0, (x + 2.0) / 3.0), 7.5 / 9.0),
            (lambda x: max(0.0, 1.0 - (x + 2.0) / 6.0), 1.0 / 3.0),
        ],
    )
    def test_auc_piecewise_linear(self, fn, expected):
        assert auc(piecewise_profile(fn)) == pytest.approx(expected, abs=1e-12)

    def test_fraction_at(self):
        profile = PerformanceProfile.from_ratios("a", [2.0, 8.0])
        assert profile.fraction_at(4.0) == 0.5
        assert profile.fraction_at(2.0) == 1.0

    def test_step_curve_is_nonincreasing(self):
        profile = PerformanceProfile.from_ratios("a", [0.3, 1.0, 5.0, 40.0, 0.0])
        assert np.all(np.diff(profile.y) <= 0)
        assert profile.y[0] == 0.8
        assert profile.y[-1] == 0.0

    def test_build_profile_counts_missing_problems(self, make_record):
        profile = build_profile([make_record("a", work=250)], problems=["a", "b"])
        np.testing.assert_array_equal(profile.ratios, [4.0, 0.0])
        assert profile.label == "ic(0) [natural]"

    def test_empty(self):
        with pytest.raises(EmptyRecordSetError):
            build_profile([])


@pytest.mark.unit
class TestSummaryStats:
    def test_geo_mean_failure_penalty(self):
        assert geo_mean([4.0, 0.0]) == pytest.approx(1.0, abs=1e-12)

    def test_geo_mean_cap(self):
        assert geo_mean([1024.0]) == pytest.approx(128.0)

    def test_all_parity(self, make_record):
        stats = summary_stats([make_record(f"m{i}", work=1000) for i in range(4)])
        assert stats.geo_mean == pytest.approx(1.0, abs=1e-12)
        assert stats.parity == 1.0
        assert stats.ge2x == 0.0

    def test_hand_built_fixture(self, table_records):
        stats = summary_stats(table_records)
        assert stats.geo_mean == pytest.approx(2.0**0.6, abs=1e-12)
        assert stats.parity == pytest.approx(0.6, abs=1e-12)
        assert stats.ge2x == pytest.approx(0.6, abs=1e-12)
        assert stats.ge4x == pytest.approx(0.4, abs=1e-12)
        assert stats.ge8x == pytest.approx(0.2, abs=1e-12)
        assert stats.success_rate == 1.0
        assert stats.problems == 5

        ratios = np.array([2.0, 4.0, 8.0, 0.0, 0.5])
        grid = np.linspace(-2.0, 7.0, 512)
        y = [float(np.mean(ratios >= 2.0**x)) for x in grid]
        area = 0.0
        for i in range(len(grid) - 1):
            area += (y[i] + y[i + 1]) / 2.0 * (grid[i + 1] - grid[i])
        assert stats.auc == pytest.approx(area / 9.0, abs=1e-12)

    def test_generation_failures_lower_success(self, make_record):
        records = [make_record("a"), make_record("b", work=None, status=RunStatus.GENERATION_FAILURE)]
        stats = summary_stats(records)
        assert stats.success_rate == 0.5
        assert stats.parity == 0.5

    def test_missing_problem_counts_against_success(self, make_record):
        stats = summary_stats([make_record("a")], problems=["a", "b"])
        assert stats.success_rate == 0.5
        assert stats.problems == 2

    def test_empty(self):
        with pytest.raises(EmptyRecordSetError):
            summary_stats([])


@pytest.mark.unit
class TestBestSelection:
    def test_single_vs_tuned(self, make_record):
        groups = {
            "A": [make_record("m1", precond_label="A", work=250), make_record("m2", precond_label="A", work=1000)],
            "B": [make_record("m1", precond_label="B", work=1000), make_record("m2", precond_label="B", work=500)],
        }
        label, profile = single_best(groups)
        assert label == "A"
        np.testing.assert_array_equal(profile.ratios, [4.0, 1.0])

        choices, tuned = tuned_best(groups)
        assert choices == {"m1": "A", "m2": "B"}
        np.testing.assert_array_equal(tuned.ratios, [4.0, 2.0])
        assert auc(tuned) >= auc(profile)

    def test_ties_go_to_smallest_label(self, make_record):
        groups = {
            "b": [make_record("m1", precond_label="b", work=500)],
            "a": [make_record("m1", precond_label="a", work=500)],
        }
        assert single_best(groups)[0] == "a"
        assert tuned_best(groups)[0] == {"m1": "a"}

    def test_missing_matrix_counts_as_failure(self, make_record):
        groups = {
            "full": [make_record("m1", work=1000), make_record("m2", work=1000)],
            "partial": [make_record("m1", work=500)],
        }
        label, profile = single_best(groups)
        assert label == "full"
        assert profile.problems == 2

    def test_empty(self):
        with pytest.raises(EmptyRecordSetError):
            single_best({})
        with pytest.raises(EmptyRecordSetError):
            tuned_best({})
