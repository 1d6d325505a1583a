"""Sweep harness: spec validation, op counting, report shape, degradation."""

import pytest

from hdckit.pipeline import PipelineConfig, footprint
from hdckit.datasets import make_synthetic
from hdckit.sweeps import (
    AXES,
    DegradationRow,
    SweepReport,
    SweepSpec,
    degradation_table,
    linear_r_squared,
    measure_op_count,
    run_sweep,
)

BASE = PipelineConfig(dim=512, channels=4, levels=8, vmin=0.0, vmax=7.0, seed=5)


class TestSweepSpec:
    def test_axis_names(self):
        assert AXES == ("dimension", "ngram", "channels", "workers")
        for axis in AXES:
            SweepSpec(axis=axis, values=(1, 2), baseline=BASE)

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError, match="axis must be one of"):
            SweepSpec(axis="noise", values=(1, 2))

    @pytest.mark.parametrize("values", [(), (3, 3), (5, 2)])
    def test_values_must_strictly_increase(self, values):
        with pytest.raises(ValueError):
            SweepSpec(axis="dimension", values=values)

    def test_repetition_floor(self):
        with pytest.raises(ValueError, match="at least 3 repetitions"):
            SweepSpec(axis="dimension", values=(1, 2), repetitions=2)
        assert SweepSpec(axis="dimension", values=(1, 2), repetitions=3).repetitions == 3

    def test_config_at_replaces_one_field(self):
        spec = SweepSpec(axis="channels", values=(2, 6), baseline=BASE)
        cfg = spec.config_at(6)
        assert cfg.channels == 6
        assert cfg.dim == BASE.dim and cfg.seed == BASE.seed

    def test_windows_floor(self):
        with pytest.raises(ValueError, match="windows"):
            SweepSpec(axis="dimension", values=(1, 2), windows=0)


class TestRSquared:
    def test_perfect_line(self):
        assert linear_r_squared([1, 2, 3], [10.0, 20.0, 30.0]) == pytest.approx(1.0)
        assert linear_r_squared([1, 2, 3], [7.0, 7.0, 7.0]) == 1.0

    def test_known_value(self):
        # y deviates from the best line y = x by symmetric residuals:
        # x = [1,2,3], y = [1,3,2]; r^2 = 1 - residual/total = 0.25.
        assert linear_r_squared([1, 2, 3], [1.0, 3.0, 2.0]) == pytest.approx(0.25)

    def test_degenerate_x(self):
        assert linear_r_squared([2, 2, 2], [1.0, 2.0, 3.0]) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            linear_r_squared([1], [1.0])
        with pytest.raises(ValueError):
            linear_r_squared([1, 2], [1.0])


class TestOpCounts:
    def test_deterministic(self):
        a = measure_op_count(BASE, windows=16)
        b = measure_op_count(BASE, windows=16)
        assert a == b > 0

    def test_exactly_proportional_in_dimension(self):
        spec_values = (256, 512, 1024)
        ops = [
            measure_op_count(PipelineConfig(
                dim=d, channels=4, levels=8, vmin=0.0, vmax=7.0, seed=5
            ), windows=16)
            for d in spec_values
        ]
        assert ops[1] == 2 * ops[0]
        assert ops[2] == 4 * ops[0]

    def test_exactly_affine_in_window_length(self):
        ops = [
            measure_op_count(
                PipelineConfig(
                    dim=512, channels=4, levels=8, vmin=0.0, vmax=7.0,
                    ngram=n, seed=5,
                ),
                windows=16,
            )
            for n in (1, 2, 3, 4)
        ]
        diffs = [b - a for a, b in zip(ops, ops[1:])]
        assert len(set(diffs)) == 1 and diffs[0] > 0

    def test_exactly_affine_in_channels_per_parity(self):
        def at(c):
            return measure_op_count(
                PipelineConfig(
                    dim=512, channels=c, levels=8, vmin=0.0, vmax=7.0, seed=5
                ),
                windows=16,
            )

        odd = [at(c) for c in (3, 5, 7, 9)]
        even = [at(c) for c in (2, 4, 6, 8)]
        for series in (odd, even):
            diffs = [b - a for a, b in zip(series, series[1:])]
            assert len(set(diffs)) == 1 and diffs[0] > 0


class TestRunSweep:
    def test_report_shape(self):
        spec = SweepSpec(
            axis="dimension",
            values=(128, 256),
            repetitions=3,
            baseline=BASE,
            windows=8,
        )
        report = run_sweep(spec)
        assert report.axis == "dimension"
        assert len(report.rows) == 2
        assert report.errors == ()
        for row, value in zip(report.rows, spec.values):
            assert row.axis_value == value
            assert row.median_wall_time > 0
            assert row.op_count == measure_op_count(
                spec.config_at(value), windows=8
            )
            assert row.footprint_bytes == footprint(
                spec.config_at(value), 5
            )["totalBytes"]
            assert row.throughput_windows_per_sec == pytest.approx(
                8 / row.median_wall_time
            )
            assert row.latency_ms_per_window == pytest.approx(
                1000 * row.median_wall_time / 8
            )
        assert 0.0 <= report.wall_time_r_squared <= 1.0

    def test_csv_layout(self):
        spec = SweepSpec(
            axis="ngram", values=(1, 2), repetitions=3, baseline=BASE, windows=8
        )
        text = run_sweep(spec).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == SweepReport.CSV_HEADER
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "1" and len(first) == 5


class TestDegradation:
    def test_accuracy_per_dimension(self):
        data = make_synthetic(3, 4, 12, 4, 0.0, seed=6, levels=8, vmax=7.0)
        rows = degradation_table(data, (64, 256), BASE, train_fraction=0.5)
        assert [r.dim for r in rows] == [64, 256]
        assert all(isinstance(r, DegradationRow) for r in rows)
        # Noiseless constant patterns classify perfectly even at modest size.
        assert rows[-1].accuracy == 1.0

    def test_same_split_each_dimension_is_deterministic(self):
        data = make_synthetic(3, 4, 12, 4, 1.0, seed=6, levels=8, vmax=7.0)
        a = degradation_table(data, (64, 128), BASE, 0.5, split_seed=3)
        b = degradation_table(data, (64, 128), BASE, 0.5, split_seed=3)
        assert a == b

    def test_needs_two_classes(self):
        data = make_synthetic(2, 4, 8, 2, 0.0, seed=1, levels=8, vmax=7.0)
        solo = [t for t in data if t.label == "class0"]
        with pytest.raises(ValueError, match="at least 2 classes"):
            degradation_table(solo, (64,), BASE, 1.0)
