"""Scalability sweeps and the dimension-degradation table.

A sweep fixes a baseline config, varies one axis (dimension, ngram, channels,
or workers), and at each value trains a small synthetic model and classifies
a fixed-size window stream.  Each row records the median wall time over
repetitions, the deterministic operation count of one serial classification
pass, the closed-form footprint, and windows-per-second throughput.  Holding
the window count constant across axis values is what makes operation counts
exactly proportional to the dimension and exactly affine in the window length
and channel count.

Wall time is the only non-deterministic column; the report carries the
least-squares R-squared of time against the axis so linear growth can be
asserted without pinning absolute speeds.

The degradation table retrains the same dataset at several dimensions with an
identical split and reports full-dataset accuracy per dimension.
"""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass, replace

from .bitvec import count_ops
from .datasets import Trial, make_synthetic
from .pipeline import (
    Model,
    PipelineConfig,
    classify_dataset,
    classify_trial,
    footprint,
    train,
)

AXES = ("dimension", "ngram", "channels", "workers")

_AXIS_FIELD = {
    "dimension": "dim",
    "ngram": "ngram",
    "channels": "channels",
    "workers": "workers",
}

# Synthetic workload shape shared by every sweep row.
_SWEEP_CLASSES = 5
_SWEEP_TRAIN_TRIALS = 2
_SWEEP_TRAIN_WINDOWS = 32
_SWEEP_NOISE = 1.0


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: the axis, its values, and the fixed baseline."""

    axis: str
    values: tuple[int, ...]
    repetitions: int = 5
    baseline: PipelineConfig = PipelineConfig()
    windows: int = 512
    data_seed: int = 99

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(int(v) for v in self.values)
        if not values:
            raise ValueError("need at least one axis value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("axis values must be strictly increasing")
        object.__setattr__(self, "values", values)
        if self.repetitions < 3:
            raise ValueError(
                f"timing needs at least 3 repetitions, got {self.repetitions}"
            )
        if self.windows < 1:
            raise ValueError(f"windows must be >= 1, got {self.windows}")

    def config_at(self, value: int) -> PipelineConfig:
        return replace(self.baseline, **{_AXIS_FIELD[self.axis]: value})


@dataclass(frozen=True)
class SweepRow:
    axis_value: int
    median_wall_time: float
    op_count: int
    footprint_bytes: int
    throughput_windows_per_sec: float

    @property
    def latency_ms_per_window(self) -> float:
        return 1000.0 / self.throughput_windows_per_sec


@dataclass(frozen=True)
class SweepReport:
    axis: str
    windows: int
    rows: tuple[SweepRow, ...]
    wall_time_r_squared: float
    errors: tuple[tuple[int, str], ...] = ()

    CSV_HEADER = (
        "axisValue,medianWallTime,opCount,footprintBytes,throughputWindowsPerSec"
    )

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.axis_value},{r.median_wall_time:.6f},{r.op_count},"
                f"{r.footprint_bytes},{r.throughput_windows_per_sec:.3f}"
            )
        return "\n".join(lines) + "\n"


def linear_r_squared(xs, ys) -> float:
    """R-squared of the least-squares line through (xs, ys)."""
    n = len(xs)
    if n != len(ys) or n < 2:
        raise ValueError("need at least two points")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    if syy == 0.0:
        return 1.0
    if sxx == 0.0:
        return 0.0
    residual = syy - sxy * sxy / sxx
    return 1.0 - residual / syy


def _workload(config: PipelineConfig, windows: int, data_seed: int) -> tuple[Model, Trial]:
    """Train the standard small model and build the standard query stream."""
    n = config.ngram
    train_set = make_synthetic(
        _SWEEP_CLASSES,
        config.channels,
        _SWEEP_TRAIN_WINDOWS + n - 1,
        _SWEEP_TRAIN_TRIALS,
        _SWEEP_NOISE,
        seed=data_seed,
        levels=config.levels,
        vmin=config.vmin,
        vmax=config.vmax,
    )
    model = train(config, train_set, train_fraction=1.0)
    eval_set = make_synthetic(
        _SWEEP_CLASSES,
        config.channels,
        windows + n - 1,
        1,
        _SWEEP_NOISE,
        seed=data_seed + 1,
        levels=config.levels,
        vmin=config.vmin,
        vmax=config.vmax,
    )
    return model, eval_set[0]


def measure_op_count(config: PipelineConfig, windows: int, data_seed: int = 99) -> int:
    """Component-operation count of one serial classification pass."""
    model, trial = _workload(config, windows, data_seed)
    model.memories  # build outside the counted region
    with count_ops() as counter:
        classify_trial(model, trial, workers=1)
    return counter.units


def run_sweep(spec: SweepSpec) -> SweepReport:
    """Execute a sweep; rows whose value exceeds memory are skipped with a note."""
    prepared = []
    errors = []
    for value in spec.values:
        try:
            config = spec.config_at(value)
            model, trial = _workload(config, spec.windows, spec.data_seed)
            with count_ops() as counter:
                classify_trial(model, trial, workers=1)
            op_count = counter.units
            classify_trial(model, trial)  # warm pools and caches, untimed
            prepared.append((value, config, model, trial, op_count))
        except MemoryError:
            errors.append((value, "axis value exceeds the memory budget"))
    # Repetitions are interleaved across axis values (round-robin rounds, not
    # per-value bursts) so slow phases of a busy host land on every row alike
    # instead of biasing whichever value was being timed at that moment.  The
    # collector is paused so its pauses don't land inside timed passes.
    times = {value: [] for value, *_ in prepared}
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(spec.repetitions):
            for value, _, model, trial, _ in prepared:
                t0 = time.perf_counter()
                classify_trial(model, trial)
                times[value].append(time.perf_counter() - t0)
    finally:
        if was_enabled:
            gc.enable()
    rows = []
    for value, config, _, _, op_count in prepared:
        median = statistics.median(times[value])
        rows.append(
            SweepRow(
                axis_value=value,
                median_wall_time=median,
                op_count=op_count,
                footprint_bytes=footprint(config, _SWEEP_CLASSES)["totalBytes"],
                throughput_windows_per_sec=spec.windows / median,
            )
        )
    if len(rows) >= 2:
        r2 = linear_r_squared(
            [r.axis_value for r in rows], [r.median_wall_time for r in rows]
        )
    else:
        r2 = 1.0
    return SweepReport(
        axis=spec.axis,
        windows=spec.windows,
        rows=tuple(rows),
        wall_time_r_squared=r2,
        errors=tuple(errors),
    )


@dataclass(frozen=True)
class DegradationRow:
    dim: int
    accuracy: float


def degradation_table(
    dataset: list[Trial],
    dims: tuple[int, ...],
    baseline: PipelineConfig,
    train_fraction: float,
    split_seed: int | None = None,
) -> tuple[DegradationRow, ...]:
    """Accuracy at each dimension, same split throughout.

    Trains on the first-fraction split at every dimension and tests on the
    entire dataset, mirroring a train-once / test-everything protocol.
    """
    labels = {t.label for t in dataset}
    if len(labels) < 2:
        raise ValueError("degradation needs at least 2 classes")
    rows = []
    for dim in dims:
        config = replace(baseline, dim=int(dim))
        model = train(config, dataset, train_fraction, split_seed)
        results = classify_dataset(model, dataset)
        hits = sum(r.label == t.label for r, t in zip(results, dataset))
        rows.append(DegradationRow(dim=int(dim), accuracy=hits / len(dataset)))
    return tuple(rows)
