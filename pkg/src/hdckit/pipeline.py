"""End-to-end chain: quantize, encode spatially, window, train and query.

A :class:`PipelineConfig` fixes the vector dimension, channel count, level
scale, window length, and the single seed every memory derives from.  Given a
config, `train` bundles each class's window vectors into an associative
memory and `classify_trial` encodes unseen samples the same way, bundles all
window vectors of the trial into one query, and returns the nearest class
(per-window verdicts are reported alongside for diagnostics).

Parallelism is data-parallel with a deterministic merge: training splits
trials across workers, classification splits the window range.  Every partial
result is an integer count vector or an ordered slice, and integer addition
plus order-preserving concatenation make the merged result bit-identical for
any worker count.  The `workers` knob therefore changes wall time only, never
bytes; model files exclude it.

Models persist as versioned JSON: config fields, then per class the label,
the prototype, and the raw bundle counts, vectors and counts both as
fixed-width lowercase hex words.  Storing counts makes later `update` calls
exactly equivalent to retraining; reloading is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from . import rng
from .am import AssociativeMemory
from .bitvec import (
    Accumulator,
    Hypervector,
    _wrap,
    from_hex,
    op_counter,
    random_hypervector,
    threshold_majority,
    to_hex,
    unpack_rows,
    words_for,
)
from .datasets import Trial, split_train_eval
from .encoders import ngram_encode_batch, spatial_encode_batch
from .memories import ContinuousItemMemory, ItemMemory

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    """Immutable pipeline parameters; defaults mirror a 4-channel EMG task."""

    dim: int = 10000
    channels: int = 4
    levels: int = 22
    vmin: float = 0.0
    vmax: float = 21.0
    ngram: int = 1
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")
        if not self.vmin < self.vmax:
            raise ValueError(f"empty value range: [{self.vmin}, {self.vmax}]")
        if self.ngram < 1:
            raise ValueError(f"ngram must be >= 1, got {self.ngram}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class Memories:
    """The two read-only encoding tables a config implies."""

    im: ItemMemory
    cim: ContinuousItemMemory


def build_memories(config: PipelineConfig) -> Memories:
    """Channel and level vectors for a config; pure function of the seed."""
    return Memories(
        im=ItemMemory(config.seed, config.channels, config.dim),
        cim=ContinuousItemMemory(
            config.seed, config.levels, config.dim, config.vmin, config.vmax
        ),
    )


# Per-process memo so pool workers build each config's tables once.
_MEMORIES_MEMO: dict[PipelineConfig, Memories] = {}


def _memoized_memories(config: PipelineConfig) -> Memories:
    mem = _MEMORIES_MEMO.get(config)
    if mem is None:
        if len(_MEMORIES_MEMO) > 8:
            _MEMORIES_MEMO.clear()
        mem = _MEMORIES_MEMO[config] = build_memories(config)
    return mem


def _check_trial(config: PipelineConfig, trial: Trial) -> None:
    if trial.channels != config.channels:
        raise ValueError(
            f"channel-count mismatch: model has {config.channels},"
            f" trial has {trial.channels}"
        )


def encode_windows(
    config: PipelineConfig, memories: Memories, samples: np.ndarray
) -> np.ndarray:
    """All sliding-window vectors of a sample block, packed one per row.

    ``samples`` is (T, channels) floats on the value scale; the result is
    (T - ngram + 1, words) '<u4'.  T < ngram is an error.
    """
    levels = memories.cim.quantize_array(samples)
    spatial = spatial_encode_batch(memories.im, memories.cim, levels)
    return ngram_encode_batch(spatial, config.ngram, config.dim)


def encode_trial(
    config: PipelineConfig, memories: Memories, trial: Trial
) -> list[Hypervector]:
    """`encode_windows` with Hypervector rows; one entry per window."""
    _check_trial(config, trial)
    words = encode_windows(config, memories, trial.samples)
    return [_wrap(config.dim, words[i].copy()) for i in range(words.shape[0])]


def _bundle_counts(window_words: np.ndarray, dim: int) -> np.ndarray:
    """Per-component ones counts over packed window rows (one accumulate each)."""
    op_counter().add(window_words.shape[0] * dim)
    counts = np.zeros(dim, dtype=np.int64)
    # Chunked so the unpacked uint8 block stays cache-resident at any dim.
    step = max(16, min(4096, (4 << 20) // dim))
    for lo in range(0, window_words.shape[0], step):
        counts += unpack_rows(window_words[lo : lo + step], dim).sum(
            axis=0, dtype=np.int64
        )
    return counts


# ---------------------------------------------------------------------------
# Training


def _train_chunk(
    config: PipelineConfig, chunk: list[tuple[str, np.ndarray]]
) -> list[tuple[str, np.ndarray, int]]:
    """Encode a chunk of (label, samples) trials to per-trial bundle counts."""
    memories = _memoized_memories(config)
    out = []
    for label, samples in chunk:
        words = encode_windows(config, memories, samples)
        out.append((label, _bundle_counts(words, config.dim), words.shape[0]))
    return out


def _split_chunks(items: list, parts: int) -> list[list]:
    parts = max(1, min(parts, len(items)))
    bounds = [round(i * len(items) / parts) for i in range(parts + 1)]
    return [items[bounds[i] : bounds[i + 1]] for i in range(parts)]


def _run_chunks(workers: int, fn, chunk_args: list[tuple]) -> list:
    if workers <= 1 or len(chunk_args) <= 1:
        return [fn(*args) for args in chunk_args]
    return Parallel(n_jobs=workers, backend="loky")(
        delayed(fn)(*args) for args in chunk_args
    )


def train(
    config: PipelineConfig,
    dataset: list[Trial],
    train_fraction: float = 1.0,
    split_seed: int | None = None,
) -> "Model":
    """Train an associative memory on the per-class first-fraction split.

    For each class the first ``ceil(train_fraction * count)`` trials in
    dataset order are encoded, and every window vector of the class is
    bundled into its prototype.  A split seed shuffles the dataset order
    first (reproducibly) for a randomized split.
    """
    for trial in dataset:
        _check_trial(config, trial)
    selected, _ = split_train_eval(dataset, train_fraction, split_seed)
    missing = {t.label for t in dataset} - {t.label for t in selected}
    if missing:
        raise ValueError(
            f"class {sorted(missing)[0]!r} has no training trials in the split"
        )
    jobs = [(t.label, t.samples) for t in selected]
    chunks = _split_chunks(jobs, config.workers)
    results = _run_chunks(config.workers, _train_chunk, [(config, c) for c in chunks])

    am = AssociativeMemory(config.dim, tie_seed=config.seed)
    merged: dict[str, tuple[np.ndarray, int]] = {}
    order: list[str] = []
    for chunk_result in results:
        for label, counts, nwin in chunk_result:
            if label in merged:
                prev_counts, prev_total = merged[label]
                merged[label] = (prev_counts + counts, prev_total + nwin)
            else:
                merged[label] = (counts, nwin)
                order.append(label)
    for label in order:
        counts, total = merged[label]
        am.fold_counts(label, counts, total)
    return Model(config, am)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class TrialResult:
    """Outcome of classifying one trial.

    ``label`` is the bundled-query verdict; ``distances`` are the query's
    Hamming distances per class, aligned with ``class_labels``;
    ``window_labels`` is the per-window nearest class, for diagnostics.
    """

    label: str
    class_labels: tuple[str, ...]
    distances: tuple[int, ...]
    window_labels: tuple[str, ...] = field(repr=False)


def _classify_chunk(
    config: PipelineConfig, am: AssociativeMemory, samples: np.ndarray
) -> tuple[np.ndarray, int, np.ndarray]:
    """Window counts, window total, and per-window winner indices for a slice."""
    memories = _memoized_memories(config)
    words = encode_windows(config, memories, samples)
    counts = _bundle_counts(words, config.dim)
    winners = am.query_batch(words)
    return counts, words.shape[0], winners


def classify_trial(
    model: "Model", trial: Trial, workers: int | None = None
) -> TrialResult:
    """Classify one trial by its bundled window-vector query.

    Every sliding window of the trial is encoded; all window vectors are
    bundled by majority (ties broken by a vector drawn from the model seed)
    into a single query, and the nearest prototype wins.  ``workers``
    overrides the config's worker count for this call.
    """
    config = model.config
    _check_trial(config, trial)
    workers = config.workers if workers is None else workers
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    n = config.ngram
    total_windows = trial.length - n + 1
    if total_windows < 1:
        raise ValueError(
            f"need at least {n} samples for one window, got {trial.length}"
        )

    parts = max(1, min(workers, total_windows))
    bounds = [round(i * total_windows / parts) for i in range(parts + 1)]
    # Each chunk re-encodes its own halo of n-1 samples; cheaper than sharing.
    args = [
        (config, model.am, trial.samples[bounds[i] : bounds[i + 1] + n - 1])
        for i in range(parts)
        if bounds[i] < bounds[i + 1]
    ]
    results = _run_chunks(workers, _classify_chunk, args)

    counts = np.zeros(config.dim, dtype=np.int64)
    total = 0
    winner_chunks = []
    for chunk_counts, chunk_total, winners in results:
        counts += chunk_counts
        total += chunk_total
        winner_chunks.append(winners)
    acc = Accumulator(config.dim, counts, total)
    tie = None
    if total % 2 == 0:
        tie = random_hypervector(config.seed, rng.INDEX_QUERY_TIE, config.dim)
    query = threshold_majority(acc, tie)
    _, label, distances = model.am.query(query)
    labels = model.am.labels
    window_labels = tuple(
        labels[i] for i in np.concatenate(winner_chunks).tolist()
    )
    return TrialResult(
        label=label,
        class_labels=labels,
        distances=tuple(int(d) for d in distances),
        window_labels=window_labels,
    )


def _classify_trials_chunk(
    config: PipelineConfig, am: AssociativeMemory, chunk: list[np.ndarray]
) -> list[TrialResult]:
    model = Model(config, am)
    return [
        classify_trial(model, Trial("?", samples), workers=1) for samples in chunk
    ]


def classify_dataset(
    model: "Model", trials: list[Trial], workers: int | None = None
) -> list[TrialResult]:
    """Classify many trials, parallelizing across trials."""
    config = model.config
    for trial in trials:
        _check_trial(config, trial)
    workers = config.workers if workers is None else workers
    chunks = _split_chunks([t.samples for t in trials], workers)
    results = _run_chunks(
        workers, _classify_trials_chunk, [(config, model.am, c) for c in chunks]
    )
    return [r for chunk in results for r in chunk]


# ---------------------------------------------------------------------------
# Footprint


def footprint(config: PipelineConfig, classes: int) -> dict[str, int]:
    """Closed-form byte budget of the packed state at a config.

    Counts the level table, channel table, `classes` prototypes, and the
    single-vector working buffers (one spatial, one window result, ngram
    window of depth N).  Pure arithmetic; nothing is allocated.
    """
    if classes < 0:
        raise ValueError(f"classes must be >= 0, got {classes}")
    wbytes = words_for(config.dim) * 4
    parts = {
        "cimBytes": config.levels * wbytes,
        "imBytes": config.channels * wbytes,
        "amBytes": classes * wbytes,
        "spatialBufferBytes": wbytes,
        "ngramBufferBytes": wbytes,
        "windowBufferBytes": config.ngram * wbytes,
    }
    parts["totalBytes"] = sum(parts.values())
    return parts


# ---------------------------------------------------------------------------
# Model persistence


_CONFIG_KEYS = ("dim", "channels", "levels", "min", "max", "ngram", "seed")


def _counts_to_hex(counts: np.ndarray) -> str:
    if counts.size and int(counts.max()) >= 1 << 32:
        raise ValueError("bundle counts exceed 32-bit serialization range")
    return f"{counts.size}:" + "".join(f"{int(c):08x}" for c in counts)


def _counts_from_hex(text: str, dim: int) -> np.ndarray:
    head, sep, body = text.partition(":")
    if not sep or int(head) != dim or len(body) != 8 * dim:
        raise ValueError("malformed accumulator counts")
    return np.array(
        [int(body[i : i + 8], 16) for i in range(0, len(body), 8)], dtype=np.int64
    )


class Model:
    """A trained pipeline: config plus associative memory."""

    def __init__(self, config: PipelineConfig, am: AssociativeMemory):
        if am.dim != config.dim:
            raise ValueError(f"dimension mismatch: config {config.dim}, AM {am.dim}")
        self.config = config
        self.am = am
        self._memories: Memories | None = None

    @property
    def memories(self) -> Memories:
        if self._memories is None:
            self._memories = build_memories(self.config)
        return self._memories

    def update(self, trials: list[Trial]) -> None:
        """Fold more labeled trials into the prototypes (exact retrain)."""
        for trial in trials:
            _check_trial(self.config, trial)
        for trial in trials:
            words = encode_windows(self.config, self.memories, trial.samples)
            self.am.fold_counts(
                trial.label, _bundle_counts(words, self.config.dim), words.shape[0]
            )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        config = self.config
        obj = {
            "formatVersion": FORMAT_VERSION,
            "config": {
                "dim": config.dim,
                "channels": config.channels,
                "levels": config.levels,
                "min": config.vmin,
                "max": config.vmax,
                "ngram": config.ngram,
                "seed": config.seed,
            },
            "classes": [
                {
                    "label": e.label,
                    "vector": to_hex(e.vector),
                    "counts": _counts_to_hex(e.counts),
                    "total": e.total,
                }
                for e in self.am.entries
            ],
        }
        return json.dumps(obj, indent=2) + "\n"

    def save(self, path: str) -> None:
        with open(path, "w", newline="") as f:
            f.write(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"model file is not valid JSON: {e}") from None
        if not isinstance(obj, dict) or "formatVersion" not in obj:
            raise ValueError("model file has no formatVersion field")
        if obj["formatVersion"] != FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {obj['formatVersion']!r};"
                f" this library reads version {FORMAT_VERSION}"
            )
        raw = obj.get("config", {})
        missing = [k for k in _CONFIG_KEYS if k not in raw]
        if missing:
            raise ValueError(f"model config is missing {missing[0]!r}")
        config = PipelineConfig(
            dim=raw["dim"],
            channels=raw["channels"],
            levels=raw["levels"],
            vmin=raw["min"],
            vmax=raw["max"],
            ngram=raw["ngram"],
            seed=raw["seed"],
        )
        entries = []
        for cls_obj in obj.get("classes", []):
            vector = from_hex(cls_obj["vector"])
            counts = _counts_from_hex(cls_obj["counts"], config.dim)
            entries.append((cls_obj["label"], vector, counts, cls_obj["total"]))
        am = AssociativeMemory.from_entries(config.dim, config.seed, entries)
        for entry in am.entries:
            rebuilt = am._threshold(entry.label, entry.counts, entry.total)
            if rebuilt != entry.vector:
                raise ValueError(
                    f"class {entry.label!r}: stored prototype does not match"
                    f" its accumulator counts"
                )
        return cls(config, am)

    @classmethod
    def load(cls, path: str) -> "Model":
        with open(path, "r") as f:
            return cls.from_json(f.read())
