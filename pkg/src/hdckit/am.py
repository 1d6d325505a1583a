"""Associative memory: per-class prototype vectors queried by Hamming distance.

Training bundles every encoded window of a class into one prototype by
componentwise majority.  The memory keeps each class's raw ones-counts
alongside the thresholded prototype, so adding examples later re-thresholds
the enlarged counts and lands bit-for-bit where retraining from scratch
would.

Majority ties (possible only for classes with an even example count) are
broken by a deterministic per-class vector drawn from the memory's tie seed
and a digest of the label, so the same labeled data yields the same prototype
in any process.

Queries return the class with the smallest Hamming distance; distance ties go
to the class registered first.
"""

from __future__ import annotations

import hashlib
from collections.abc import Sequence

import numpy as np

from .bitvec import (
    Accumulator,
    Hypervector,
    _wrap,
    op_counter,
    random_hypervector,
    threshold_majority,
    unpack_rows,
    words_for,
)


def label_slot(label: str) -> int:
    """Stable 64-bit stream slot for a class label.

    Uses a cryptographic digest rather than the built-in ``hash`` so the slot
    (and therefore the tie-break vector and every persisted prototype) is
    identical across processes and platforms.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class ClassEntry:
    """One trained class: its label, prototype, and raw bundle counts."""

    __slots__ = ("label", "vector", "counts", "total")

    def __init__(self, label: str, vector: Hypervector, counts: np.ndarray, total: int):
        self.label = label
        self.vector = vector
        self.counts = counts
        self.total = total


def _as_words(vectors, dim: int) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        if vectors.ndim != 2 or vectors.shape[1] != words_for(dim):
            raise ValueError(
                f"expected (n, {words_for(dim)}) packed rows, got {vectors.shape}"
            )
        return np.ascontiguousarray(vectors, dtype="<u4")
    rows = list(vectors)
    for v in rows:
        if v.dim != dim:
            raise ValueError(f"dimension mismatch: {dim} vs {v.dim}")
    return np.vstack([v.words for v in rows])


class AssociativeMemory:
    """Ordered set of class prototypes over a fixed dimension."""

    def __init__(self, dim: int, tie_seed: int):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = dim
        self.tie_seed = tie_seed
        self._entries: list[ClassEntry] = []
        self._index: dict[str, int] = {}
        self._matrix: np.ndarray | None = None

    # -- training ----------------------------------------------------------

    def tie_vector(self, label: str) -> Hypervector:
        """The deterministic majority tie-breaker for a label."""
        return random_hypervector(self.tie_seed, label_slot(label), self.dim)

    def train_class(self, label: str, vectors) -> ClassEntry:
        """Register a new class from its encoded window vectors.

        ``vectors`` is a packed (n, words) array or a sequence of
        hypervectors.  The label must not already be present; use
        :meth:`update` to add examples to an existing class.
        """
        if label in self._index:
            raise ValueError(f"class {label!r} already trained; use update()")
        words = _as_words(vectors, self.dim)
        if words.shape[0] < 1:
            raise ValueError(f"class {label!r} has no training vectors")
        counts = unpack_rows(words, self.dim).sum(axis=0, dtype=np.int64)
        op_counter().add(words.shape[0] * self.dim)
        entry = ClassEntry(label, self._threshold(label, counts, words.shape[0]),
                           counts, words.shape[0])
        self._index[label] = len(self._entries)
        self._entries.append(entry)
        self._matrix = None
        return entry

    def update(self, label: str, vectors) -> ClassEntry:
        """Fold more window vectors into a class and re-threshold its prototype.

        Equivalent to retraining the class on the union of all vectors it has
        ever seen.  Unknown labels are registered as new classes.
        """
        if label not in self._index:
            return self.train_class(label, vectors)
        words = _as_words(vectors, self.dim)
        entry = self._entries[self._index[label]]
        entry.counts = entry.counts + unpack_rows(words, self.dim).sum(
            axis=0, dtype=np.int64
        )
        op_counter().add(words.shape[0] * self.dim)
        entry.total += words.shape[0]
        entry.vector = self._threshold(label, entry.counts, entry.total)
        self._matrix = None
        return entry

    def fold_counts(self, label: str, counts: np.ndarray, total: int) -> ClassEntry:
        """Fold pre-bundled ones counts into a class (new or existing).

        This is the merge point for data-parallel training: partial counts
        from any chunking sum to the same integers, so the resulting
        prototype is independent of how the work was split.
        """
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (self.dim,):
            raise ValueError(f"counts shape {counts.shape} does not match dim {self.dim}")
        if total < 1:
            raise ValueError(f"class {label!r} has no training vectors")
        if label in self._index:
            entry = self._entries[self._index[label]]
            entry.counts = entry.counts + counts
            entry.total += total
            entry.vector = self._threshold(label, entry.counts, entry.total)
        else:
            entry = ClassEntry(label, self._threshold(label, counts, total),
                               counts.copy(), total)
            self._index[label] = len(self._entries)
            self._entries.append(entry)
        self._matrix = None
        return entry

    def _threshold(self, label: str, counts: np.ndarray, total: int) -> Hypervector:
        acc = Accumulator(self.dim, counts, total)
        tie = self.tie_vector(label) if total % 2 == 0 else None
        return threshold_majority(acc, tie)

    # -- queries -----------------------------------------------------------

    def _class_matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.vstack([e.vector.words for e in self._entries])
        return self._matrix

    def distances(self, query: Hypervector) -> np.ndarray:
        """Hamming distance from the query to every prototype, in class order."""
        if not self._entries:
            raise ValueError("associative memory has no classes")
        if query.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {query.dim}")
        op_counter().add(2 * self.dim * len(self._entries))
        diff = self._class_matrix() ^ query.words
        return np.bitwise_count(diff).sum(axis=1, dtype=np.int64)

    def query(self, query: Hypervector) -> tuple[int, str, np.ndarray]:
        """(winning class index, its label, all distances); ties to lowest index."""
        d = self.distances(query)
        best = int(np.argmin(d))
        return best, self._entries[best].label, d

    def distances_batch(self, words: np.ndarray) -> np.ndarray:
        """(n, classes) Hamming distances for packed query rows."""
        if not self._entries:
            raise ValueError("associative memory has no classes")
        words = _as_words(words, self.dim)
        matrix = self._class_matrix()
        op_counter().add(2 * self.dim * len(self._entries) * words.shape[0])
        out = np.empty((words.shape[0], len(self._entries)), dtype=np.int64)
        # Budget the (rows, classes, words) XOR block by bytes so the distance
        # kernel runs at the same cache tier at every dimension.
        block_bytes = len(self._entries) * self._class_matrix().shape[1] * 4
        step = max(16, min(4096, (4 << 20) // max(1, block_bytes)))
        for lo in range(0, words.shape[0], step):
            block = words[lo : lo + step]
            diff = block[:, None, :] ^ matrix[None, :, :]
            out[lo : lo + block.shape[0]] = np.bitwise_count(diff).sum(
                axis=2, dtype=np.int64
            )
        return out

    def query_batch(self, words: np.ndarray) -> np.ndarray:
        """Winning class index per packed query row; ties to lowest index."""
        return np.argmin(self.distances_batch(words), axis=1)

    # -- introspection -----------------------------------------------------

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self._entries)

    def entry(self, label: str) -> ClassEntry:
        try:
            return self._entries[self._index[label]]
        except KeyError:
            raise KeyError(f"unknown class {label!r}") from None

    @property
    def entries(self) -> tuple[ClassEntry, ...]:
        return tuple(self._entries)

    @property
    def nbytes(self) -> int:
        """Bytes of packed prototype payload held by this memory."""
        return len(self._entries) * words_for(self.dim) * 4

    def __len__(self) -> int:
        return len(self._entries)

    # -- persistence support -----------------------------------------------

    @classmethod
    def from_entries(
        cls,
        dim: int,
        tie_seed: int,
        entries: Sequence[tuple[str, Hypervector, np.ndarray, int]],
    ) -> "AssociativeMemory":
        """Rebuild a memory from persisted (label, vector, counts, total) rows."""
        am = cls(dim, tie_seed)
        for label, vector, counts, total in entries:
            if label in am._index:
                raise ValueError(f"duplicate class {label!r}")
            counts = np.asarray(counts, dtype=np.int64)
            if counts.shape != (dim,):
                raise ValueError(f"counts shape {counts.shape} does not match dim {dim}")
            if vector.dim != dim:
                raise ValueError(f"dimension mismatch: {dim} vs {vector.dim}")
            am._index[label] = len(am._entries)
            am._entries.append(ClassEntry(label, vector, counts, total))
        return am
