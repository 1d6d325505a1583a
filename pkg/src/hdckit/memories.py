"""Item memories: fixed random vectors for discrete ids and graded levels.

An :class:`ItemMemory` maps small integer ids (e.g. channel numbers) to
independent random hypervectors.  A :class:`ContinuousItemMemory` maps
quantization levels to vectors whose pairwise distance grows linearly with
level separation: walking from the bottom level to the top flips a fresh,
disjoint block of positions at each step, half the dimension in total, so the
two endpoints land at the expected distance of unrelated vectors while
neighbors stay almost identical.

Both are pure functions of (seed, shape): rebuilding with the same arguments
yields bit-identical vectors, so persisted models only need to store seeds.
"""

from __future__ import annotations

import math

import numpy as np

from . import rng
from .bitvec import (
    Hypervector,
    _wrap,
    op_counter,
    pack_rows,
    random_hypervector,
    unpack_rows,
    words_for,
)


def quantize(x: float, vmin: float, vmax: float, levels: int) -> int:
    """Nearest level index for x on the [vmin, vmax] scale.

    The scale maps vmin to level 0 and vmax to ``levels - 1``; exact halves
    round up and out-of-range values clamp to the end levels.  Non-finite
    input is an error rather than a silent clamp.
    """
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    _check_scale(vmin, vmax, levels)
    t = (x - vmin) / (vmax - vmin) * (levels - 1)
    return min(max(math.floor(t + 0.5), 0), levels - 1)


def quantize_array(
    xs: np.ndarray, vmin: float, vmax: float, levels: int
) -> np.ndarray:
    """Vectorized :func:`quantize` over a float array of any shape."""
    _check_scale(vmin, vmax, levels)
    xs = np.asarray(xs, dtype=np.float64)
    if not np.isfinite(xs).all():
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(xs))[0])
        raise ValueError(f"cannot quantize non-finite value at index {bad}")
    t = (xs - vmin) / (vmax - vmin) * (levels - 1)
    return np.clip(np.floor(t + 0.5).astype(np.int64), 0, levels - 1)


def _check_scale(vmin: float, vmax: float, levels: int) -> None:
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels}")
    if not vmin < vmax:
        raise ValueError(f"empty value range: [{vmin}, {vmax}]")


class ItemMemory:
    """`count` independent random vectors, one per id in ``range(count)``."""

    __slots__ = ("seed", "count", "dim", "_vectors", "words")

    def __init__(self, seed: int, count: int, dim: int):
        if count < 1:
            raise ValueError(f"need at least 1 entry, got {count}")
        vectors = tuple(random_hypervector(seed, i, dim) for i in range(count))
        words = np.vstack([v.words for v in vectors])
        words.flags.writeable = False
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "count", count)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_vectors", vectors)
        object.__setattr__(self, "words", words)

    def __setattr__(self, name, value):
        raise AttributeError("ItemMemory is immutable")

    def __reduce__(self):
        return (ItemMemory, (self.seed, self.count, self.dim))

    def vector(self, i: int) -> Hypervector:
        if not 0 <= i < self.count:
            raise IndexError(f"id {i} out of range for {self.count} entries")
        return self._vectors[i]

    @property
    def nbytes(self) -> int:
        """Bytes of packed vector payload held by this memory."""
        return self.count * words_for(self.dim) * 4

    def __len__(self) -> int:
        return self.count


class ContinuousItemMemory:
    """Level vectors with distance linear in level separation.

    Level 0 is a random endpoint.  A deterministic ordering of all positions
    is drawn once; stepping up a level flips the next block of that ordering,
    ``dim // 2`` positions across all ``levels - 1`` steps, block sizes as
    even as possible with the remainder on the earliest steps.  Each position
    flips at most once, so distance from level 0 grows by exactly one block
    per step and adjacent levels stay maximally similar.

    Also owns the value scale: :meth:`quantize` maps a raw reading on
    [vmin, vmax] to its level index.
    """

    __slots__ = ("seed", "levels", "dim", "vmin", "vmax", "_vectors", "words")

    def __init__(self, seed: int, levels: int, dim: int, vmin: float, vmax: float):
        _check_scale(vmin, vmax, levels)
        base = random_hypervector(seed, rng.INDEX_CIM_BASE, dim)
        order = rng.stream_order(seed, rng.SALT_ORDER, rng.INDEX_CIM_BASE, dim)
        steps = levels - 1
        total = dim // 2
        block, remainder = divmod(total, steps)
        bits = np.empty((levels, dim), dtype=np.uint8)
        bits[0] = unpack_rows(base.words[None, :], dim)[0]
        offset = 0
        for s in range(steps):
            size = block + (1 if s < remainder else 0)
            row = bits[s].copy()
            row[order[offset : offset + size]] ^= 1
            bits[s + 1] = row
            offset += size
        op_counter().add(steps * dim)
        words = pack_rows(bits)
        words.flags.writeable = False
        vectors = tuple(_wrap(dim, words[i].copy()) for i in range(levels))
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vmin", float(vmin))
        object.__setattr__(self, "vmax", float(vmax))
        object.__setattr__(self, "_vectors", vectors)
        object.__setattr__(self, "words", words)

    def __setattr__(self, name, value):
        raise AttributeError("ContinuousItemMemory is immutable")

    def __reduce__(self):
        return (
            ContinuousItemMemory,
            (self.seed, self.levels, self.dim, self.vmin, self.vmax),
        )

    def vector(self, level: int) -> Hypervector:
        if not 0 <= level < self.levels:
            raise IndexError(f"level {level} out of range for {self.levels} levels")
        return self._vectors[level]

    def quantize(self, x: float) -> int:
        return quantize(x, self.vmin, self.vmax, self.levels)

    def quantize_array(self, xs: np.ndarray) -> np.ndarray:
        return quantize_array(xs, self.vmin, self.vmax, self.levels)

    @property
    def nbytes(self) -> int:
        """Bytes of packed vector payload held by this memory."""
        return self.levels * words_for(self.dim) * 4

    def __len__(self) -> int:
        return self.levels
