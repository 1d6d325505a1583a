"""Deterministic counter-based random word streams.

Every random bit in the library comes from one construction: a splitmix64-style
finalizer applied to a golden-ratio counter whose start is derived from
``(seed, salt, index)``.  Vectors are therefore pure functions of their seed and
slot and can be regenerated bit-exactly on any platform, which is what lets
model files store seeds instead of vectors.

Stream addressing:
  * ``seed``  -- user-chosen 64-bit value, one per model / memory.
  * ``salt``  -- small constant separating internal stream families (plain
    vector words, balanced-generation sort keys, level-memory flip order).
  * ``index`` -- slot within a family, e.g. the channel number in an item
    memory.  Indices at and above ``RESERVED_INDEX_BASE`` are claimed by the
    library for internal vectors (level-memory base, query tie-break) so they
    can never collide with caller-supplied slots.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# splitmix64 constants (Steele, Lea, Flood 2014).
_GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

# Stream families.
SALT_WORDS = 0  # packed vector words
SALT_BALANCE = 1  # sort keys for exactly-balanced generation
SALT_ORDER = 2  # sort keys for deterministic position orderings

# First index reserved for library-internal vectors; callers use small indices.
RESERVED_INDEX_BASE = 1 << 62
INDEX_CIM_BASE = RESERVED_INDEX_BASE  # level memory endpoint vector
INDEX_QUERY_TIE = RESERVED_INDEX_BASE + 1  # trial-query bundling tie-break


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective avalanche mix of one 64-bit value."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MULT1) & MASK64
    x = ((x ^ (x >> 27)) * _MULT2) & MASK64
    return x ^ (x >> 31)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    # Vectorized mix64; uint64 multiplication wraps mod 2**64 by construction.
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_MULT1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_MULT2)
    x ^= x >> np.uint64(31)
    return x


def stream_start(seed: int, salt: int, index: int) -> int:
    """Counter start for the (seed, salt, index) slot."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    h = mix64(seed)
    h = mix64(h ^ ((salt * _GOLDEN) & MASK64))
    h = mix64(h ^ ((index * _GOLDEN) & MASK64))
    return h


def stream_u64(seed: int, salt: int, index: int, count: int) -> np.ndarray:
    """The first `count` uint64 values of the (seed, salt, index) stream."""
    start = np.uint64(stream_start(seed, salt, index))
    steps = np.arange(1, count + 1, dtype=np.uint64) * np.uint64(_GOLDEN)
    return _mix64_array(start + steps)


def stream_words(seed: int, index: int, nwords: int) -> np.ndarray:
    """`nwords` random 32-bit words (low halves of the uint64 stream)."""
    u64 = stream_u64(seed, SALT_WORDS, index, nwords)
    return (u64 & np.uint64(0xFFFFFFFF)).astype("<u4")


def stream_order(seed: int, salt: int, index: int, n: int) -> np.ndarray:
    """Deterministic ordering of range(n): positions sorted by stream keys."""
    keys = stream_u64(seed, salt, index, n)
    return np.argsort(keys, kind="stable")
