"""Trial datasets: the CSV interchange format and a synthetic generator.

A trial is one labeled multichannel recording: a (samples, channels) float
array plus a class label.  Datasets travel as CSV with header
``t,ch0,...,ch{C-1},label``, one row per timestamp; a new trial starts at a
blank line or wherever the label changes, so consecutive trials of the same
class need the blank-line delimiter.

The synthetic generator stands in for real recordings: each class gets a
characteristic constant level per channel (classes pairwise distinct), and
samples are that pattern plus Gaussian noise, clipped to the value range.
With zero noise the classes are perfectly separable by construction.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Trial:
    """One labeled recording: samples is (timestamps, channels) float64."""

    label: str
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ValueError(
                f"samples must be (timestamps, channels), got shape {samples.shape}"
            )
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[1]


def _check_channels(trials: list[Trial]) -> int:
    channels = trials[0].channels
    for t in trials:
        if t.channels != channels:
            raise ValueError(
                f"inconsistent channel counts: {channels} vs {t.channels}"
            )
    return channels


def save_csv(trials: list[Trial], path_or_file) -> None:
    """Write trials as CSV; a blank line separates consecutive trials."""
    if not trials:
        raise ValueError("no trials to write")
    channels = _check_channels(trials)
    own = isinstance(path_or_file, (str, bytes))
    f = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        header = "t," + ",".join(f"ch{c}" for c in range(channels)) + ",label\n"
        f.write(header)
        for i, trial in enumerate(trials):
            if i:
                f.write("\n")
            for t in range(trial.length):
                row = ",".join(f"{v:.6f}" for v in trial.samples[t])
                f.write(f"{t},{row},{trial.label}\n")
    finally:
        if own:
            f.close()


def load_csv(path_or_file) -> list[Trial]:
    """Read trials from CSV; malformed rows are reported with line numbers."""
    own = isinstance(path_or_file, (str, bytes))
    f = open(path_or_file, "r", newline="") if own else path_or_file
    try:
        return _parse_csv(f)
    finally:
        if own:
            f.close()


def _parse_csv(f) -> list[Trial]:
    header = f.readline()
    if not header:
        raise ValueError("line 1: empty file, expected header t,ch0,...,label")
    cols = [c.strip() for c in header.rstrip("\n").split(",")]
    if len(cols) < 3 or cols[0] != "t" or cols[-1] != "label":
        raise ValueError("line 1: expected header t,ch0,...,ch{C-1},label")
    channels = len(cols) - 2
    for c in range(channels):
        if cols[1 + c] != f"ch{c}":
            raise ValueError(f"line 1: expected column ch{c}, got {cols[1 + c]!r}")

    trials: list[Trial] = []
    rows: list[list[float]] = []
    label: str | None = None

    def flush(lineno: int):
        nonlocal rows, label
        if label is not None and not rows:
            raise ValueError(f"line {lineno}: trial {label!r} has no samples")
        if rows:
            trials.append(Trial(label, np.array(rows, dtype=np.float64)))
        rows, label = [], None

    for lineno, line in enumerate(f, start=2):
        line = line.rstrip("\n")
        if not line.strip():
            flush(lineno)
            continue
        parts = line.split(",")
        if len(parts) != channels + 2:
            raise ValueError(
                f"line {lineno}: expected {channels + 2} fields, got {len(parts)}"
            )
        row_label = parts[-1].strip()
        if not row_label:
            raise ValueError(f"line {lineno}: empty label")
        try:
            values = [float(p) for p in parts[1 : 1 + channels]]
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric channel value") from None
        if label is not None and row_label != label:
            flush(lineno)
        label = row_label
        rows.append(values)
    flush(-1)
    if not trials:
        raise ValueError("line 2: no data rows")
    return trials


def make_synthetic(
    classes: int,
    channels: int,
    length: int,
    trials_per_class: int,
    noise_sigma: float,
    seed: int,
    levels: int = 22,
    vmin: float = 0.0,
    vmax: float = 21.0,
) -> list[Trial]:
    """Deterministic labeled dataset with one constant level pattern per class.

    Class k's pattern is `channels` level indices drawn from the seed and
    re-drawn until distinct from every earlier class's pattern.  Each trial is
    the pattern on the value scale plus N(0, noise_sigma) noise, clipped to
    [vmin, vmax].  Trials are grouped by class, all of class 0 first.
    """
    if classes < 2:
        raise ValueError(f"need at least 2 classes, got {classes}")
    if channels < 1 or length < 1 or trials_per_class < 1:
        raise ValueError("channels, length, and trials per class must be positive")
    if noise_sigma < 0:
        raise ValueError(f"noise sigma must be >= 0, got {noise_sigma}")
    if levels < 2 or not vmin < vmax:
        raise ValueError("need levels >= 2 and vmin < vmax")
    if classes > levels**channels:
        raise ValueError(
            f"{classes} distinct patterns impossible with {levels} levels"
            f" on {channels} channels"
        )
    rng = np.random.default_rng(seed)
    patterns: list[tuple[int, ...]] = []
    seen = set()
    while len(patterns) < classes:
        p = tuple(int(x) for x in rng.integers(0, levels, channels))
        if p not in seen:
            seen.add(p)
            patterns.append(p)
    step = (vmax - vmin) / (levels - 1)
    out: list[Trial] = []
    for k, pattern in enumerate(patterns):
        base = vmin + step * np.array(pattern, dtype=np.float64)
        for _ in range(trials_per_class):
            samples = np.broadcast_to(base, (length, channels)).copy()
            if noise_sigma > 0:
                samples += rng.normal(0.0, noise_sigma, size=(length, channels))
                samples = np.clip(samples, vmin, vmax)
            out.append(Trial(f"class{k}", samples))
    return out


def split_train_eval(
    trials: list[Trial], train_fraction: float, split_seed: int | None = None
) -> tuple[list[Trial], list[Trial]]:
    """Per-class first-fraction split.

    Selects the first ``ceil(train_fraction * count)`` trials of each class in
    dataset order for training; the remainder evaluate.  With a split seed the
    dataset order is first shuffled deterministically, making the split
    randomized but reproducible.
    """
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError(f"train fraction must be in (0, 1], got {train_fraction}")
    if not trials:
        raise ValueError("no trials to split")
    order = list(range(len(trials)))
    if split_seed is not None:
        order = [int(i) for i in np.random.default_rng(split_seed).permutation(len(trials))]
    counts: dict[str, int] = {}
    for i in order:
        counts[trials[i].label] = counts.get(trials[i].label, 0) + 1
    quota = {label: int(np.ceil(train_fraction * n)) for label, n in counts.items()}
    train: list[Trial] = []
    evaluate: list[Trial] = []
    taken: dict[str, int] = {}
    for i in order:
        label = trials[i].label
        if taken.get(label, 0) < quota[label]:
            taken[label] = taken.get(label, 0) + 1
            train.append(trials[i])
        else:
            evaluate.append(trials[i])
    return train, evaluate
