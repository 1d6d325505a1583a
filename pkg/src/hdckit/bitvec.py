"""Bit-packed binary hypervectors and the primitive operations on them.

A hypervector with ``dim`` binary components is stored in ``ceil(dim / 32)``
little-endian 32-bit words: component ``j`` lives in word ``j // 32`` at bit
``j % 32``.  10,000 components therefore pack into 313 words.  All operations
keep the padding bits (indices >= dim in the last word) at zero, so popcounts
and Hamming distances never see stray bits.

Components are i.i.d. fair coins by default; ``random_hypervector`` also
offers an exactly-balanced mode (``dim // 2`` ones) for callers that want the
textbook half-and-half composition.

Operations are pure: inputs are never mutated and the returned vectors own
read-only word arrays.  Word-aligned slices of a vector can be processed
concurrently because every operation except rotation is word-local.

An operation counter (see ``count_ops``) tallies the logical work in
component units -- one unit per vector component touched per pass -- which is
what the benchmark harness uses to check that work scales linearly with
dimension, window size, and channel count.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from . import rng

WORD_BITS = 32


def words_for(dim: int) -> int:
    """Number of 32-bit words needed for a dim-component vector."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return (dim + WORD_BITS - 1) // WORD_BITS


def _pad_mask(dim: int) -> int:
    """Mask of valid bits in the last word."""
    tail = dim % WORD_BITS
    return 0xFFFFFFFF if tail == 0 else (1 << tail) - 1


class Hypervector:
    """A dim-component binary vector packed into 32-bit words.

    Attributes:
        dim: number of binary components.
        words: read-only ``('<u4',)`` array of length ``words_for(dim)``.
    """

    __slots__ = ("dim", "words")

    def __init__(self, dim: int, words: np.ndarray):
        nwords = words_for(dim)
        arr = np.asarray(words, dtype="<u4")
        if arr.shape != (nwords,):
            raise ValueError(
                f"expected {nwords} words for dim {dim}, got shape {arr.shape}"
            )
        if arr[-1] & ~np.uint32(_pad_mask(dim)):
            raise ValueError("padding bits beyond the dimension must be zero")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "words", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Hypervector is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypervector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.dim, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"Hypervector(dim={self.dim}, popcount={popcount(self)})"

    def __reduce__(self):
        return (Hypervector, (self.dim, self.words))


def _wrap(dim: int, words: np.ndarray) -> Hypervector:
    # Internal fast path: take ownership of a freshly built, already-masked array.
    words.flags.writeable = False
    hv = object.__new__(Hypervector)
    object.__setattr__(hv, "dim", dim)
    object.__setattr__(hv, "words", words)
    return hv


def _check_same_dim(a: Hypervector, b: Hypervector) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


# ---------------------------------------------------------------------------
# Operation counter


class OpCounter:
    """Tally of logical component operations.

    One unit is one vector component touched in one pass, so a XOR of two
    10,000-component vectors adds 10,000 units regardless of word packing.
    Single-bit reads/writes add one unit.  Batched kernels add the same units
    their per-vector composition would.
    """

    __slots__ = ("enabled", "units")

    def __init__(self):
        self.enabled = False
        self.units = 0

    def add(self, n: int) -> None:
        if self.enabled:
            self.units += n

    def reset(self) -> None:
        self.units = 0


_counter = OpCounter()


def op_counter() -> OpCounter:
    """The process-wide operation counter."""
    return _counter


@contextmanager
def count_ops():
    """Enable the op counter within a block and yield it (counts reset on entry)."""
    prev = _counter.enabled
    _counter.enabled = True
    _counter.reset()
    try:
        yield _counter
    finally:
        _counter.enabled = prev


# ---------------------------------------------------------------------------
# Construction


def zero_hypervector(dim: int) -> Hypervector:
    """The all-zero vector."""
    return _wrap(dim, np.zeros(words_for(dim), dtype="<u4"))


def random_hypervector(
    seed: int, index: int, dim: int, balanced: bool = False
) -> Hypervector:
    """Deterministic random vector for the (seed, index) slot.

    Components are i.i.d. fair coins.  With ``balanced=True`` exactly
    ``dim // 2`` components are ones, placed by a deterministic shuffle keyed
    to the same slot.
    """
    nwords = words_for(dim)
    _counter.add(dim)
    if balanced:
        order = rng.stream_order(seed, rng.SALT_BALANCE, index, dim)
        bits = np.zeros(dim, dtype=np.uint8)
        bits[order[: dim // 2]] = 1
        return _wrap(dim, pack_rows(bits[None, :])[0])
    words = rng.stream_words(seed, index, nwords)
    words[-1] &= np.uint32(_pad_mask(dim))
    return _wrap(dim, words)


# ---------------------------------------------------------------------------
# Packing helpers (shared by the batched encoder kernels)


def unpack_rows(words: np.ndarray, dim: int) -> np.ndarray:
    """(n, nwords) packed rows -> (n, dim) uint8 component rows."""
    rows = np.ascontiguousarray(words, dtype="<u4")
    bits = np.unpackbits(rows.view(np.uint8).reshape(rows.shape[0], -1), axis=1,
                         bitorder="little")
    return bits[:, :dim]


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """(n, dim) 0/1 rows -> (n, nwords) packed '<u4' rows."""
    n, dim = bits.shape
    nwords = words_for(dim)
    packed = np.packbits(bits, axis=1, bitorder="little")
    if packed.shape[1] < nwords * 4:
        pad = np.zeros((n, nwords * 4 - packed.shape[1]), dtype=np.uint8)
        packed = np.hstack([packed, pad])
    return packed.view("<u4")


def rotate_rows(words: np.ndarray, k: int, dim: int) -> np.ndarray:
    """Circularly rotate each row's dim-bit vector by k positions upward.

    Row bit j of the result equals bit (j - k) mod dim of the input.  Uses
    arbitrary-precision integers per row so rotation crosses word boundaries
    correctly for any dim, including dims that are not multiples of 32.
    """
    k %= dim
    if k == 0:
        return np.array(words, dtype="<u4", copy=True)
    mask = (1 << dim) - 1
    nbytes = words.shape[-1] * 4
    out = np.empty_like(words)
    for i in range(words.shape[0]):
        x = int.from_bytes(words[i].tobytes(), "little")
        x = ((x << k) | (x >> (dim - k))) & mask
        out[i] = np.frombuffer(x.to_bytes(nbytes, "little"), dtype="<u4")
    return out


# ---------------------------------------------------------------------------
# Primitive operations


def bind(a: Hypervector, b: Hypervector) -> Hypervector:
    """Componentwise XOR.  Commutative, associative, self-inverse."""
    _check_same_dim(a, b)
    _counter.add(a.dim)
    return _wrap(a.dim, a.words ^ b.words)


def complement(a: Hypervector) -> Hypervector:
    """Flip every component."""
    _counter.add(a.dim)
    words = ~a.words
    words[-1] &= np.uint32(_pad_mask(a.dim))
    return _wrap(a.dim, words)


def permute(a: Hypervector, k: int) -> Hypervector:
    """Circular rotation by k positions toward higher component indices.

    Component j of the result is component (j - k) mod dim of the input;
    negative k rotates the other way.  Popcount is preserved.
    """
    _counter.add(a.dim)
    return _wrap(a.dim, rotate_rows(a.words[None, :], k, a.dim)[0])


def extract_bit(a: Hypervector, j: int) -> int:
    """Component j as 0 or 1."""
    if not 0 <= j < a.dim:
        raise IndexError(f"bit index {j} out of range for dim {a.dim}")
    _counter.add(1)
    return int((a.words[j // WORD_BITS] >> np.uint32(j % WORD_BITS)) & np.uint32(1))


def insert_bit(a: Hypervector, j: int, v: int) -> Hypervector:
    """Copy of `a` with component j set to v (0 or 1)."""
    if not 0 <= j < a.dim:
        raise IndexError(f"bit index {j} out of range for dim {a.dim}")
    if v not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {v}")
    _counter.add(1)
    words = a.words.copy()
    bit = np.uint32(1) << np.uint32(j % WORD_BITS)
    if v:
        words[j // WORD_BITS] |= bit
    else:
        words[j // WORD_BITS] &= ~bit
    return _wrap(a.dim, words)


def popcount(a: Hypervector) -> int:
    """Number of components equal to 1."""
    _counter.add(a.dim)
    return int(np.bitwise_count(a.words).sum())


def hamming(a: Hypervector, b: Hypervector) -> int:
    """Number of components at which a and b differ."""
    _check_same_dim(a, b)
    _counter.add(2 * a.dim)
    return int(np.bitwise_count(a.words ^ b.words).sum())


# ---------------------------------------------------------------------------
# Majority bundling


class Accumulator:
    """Per-component ones counts over a set of added hypervectors.

    Attributes:
        dim: component count.
        counts: read-only int64 array of per-component ones counts.
        total: number of vectors added.
    """

    __slots__ = ("dim", "counts", "total")

    def __init__(self, dim: int, counts: np.ndarray | None = None, total: int = 0):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        if counts is None:
            counts = np.zeros(dim, dtype=np.int64)
        else:
            counts = np.asarray(counts, dtype=np.int64)
            if counts.shape != (dim,):
                raise ValueError(f"counts shape {counts.shape} does not match dim {dim}")
            if total < int(counts.max(initial=0)) or counts.min(initial=0) < 0:
                raise ValueError("counts must lie in [0, total]")
            if counts.flags.writeable:
                counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", total)

    def __setattr__(self, name, value):
        raise AttributeError("Accumulator is immutable; accumulate() returns a new one")

    def __repr__(self) -> str:
        return f"Accumulator(dim={self.dim}, total={self.total})"

    def __reduce__(self):
        return (Accumulator, (self.dim, self.counts, self.total))


def accumulate(acc: Accumulator, v: Hypervector) -> Accumulator:
    """New accumulator with v's components added to the counts."""
    if acc.dim != v.dim:
        raise ValueError(f"dimension mismatch: {acc.dim} vs {v.dim}")
    _counter.add(acc.dim)
    counts = acc.counts + unpack_rows(v.words[None, :], v.dim)[0]
    out = object.__new__(Accumulator)
    counts.flags.writeable = False
    object.__setattr__(out, "dim", acc.dim)
    object.__setattr__(out, "counts", counts)
    object.__setattr__(out, "total", acc.total + 1)
    return out


def threshold_majority(acc: Accumulator, tiebreak: Hypervector | None) -> Hypervector:
    """Componentwise majority of the accumulated vectors.

    Component j is 1 when counts[j] > total/2 and 0 when counts[j] < total/2.
    When total is even, exact half-and-half components take the corresponding
    tiebreak component; with an odd total no tie can occur and `tiebreak` may
    be None.
    """
    if acc.total < 1:
        raise ValueError("cannot take a majority over an empty bundle")
    if tiebreak is not None and tiebreak.dim != acc.dim:
        raise ValueError(f"dimension mismatch: {acc.dim} vs {tiebreak.dim}")
    _counter.add(acc.dim)
    doubled = acc.counts * 2
    bits = (doubled > acc.total).astype(np.uint8)
    if acc.total % 2 == 0:
        if tiebreak is None:
            raise ValueError("even-sized bundle needs a tiebreak vector")
        ties = doubled == acc.total
        if ties.any():
            tb = unpack_rows(tiebreak.words[None, :], tiebreak.dim)[0]
            bits[ties] = tb[ties]
    return _wrap(acc.dim, pack_rows(bits[None, :])[0])


# ---------------------------------------------------------------------------
# Hex serialization (used by the model file format)


def to_hex(a: Hypervector) -> str:
    """``"<dim>:<w0><w1>..."`` with each word as 8 lowercase hex digits, MSB first."""
    return f"{a.dim}:" + "".join(f"{w:08x}" for w in a.words.tolist())


def from_hex(text: str) -> Hypervector:
    """Inverse of :func:`to_hex`; validates length and padding."""
    head, sep, body = text.partition(":")
    if not sep:
        raise ValueError("hex hypervector must look like '<dim>:<hexwords>'")
    dim = int(head)
    nwords = words_for(dim)
    if len(body) != 8 * nwords:
        raise ValueError(
            f"expected {8 * nwords} hex digits for dim {dim}, got {len(body)}"
        )
    words = np.array(
        [int(body[i : i + 8], 16) for i in range(0, len(body), 8)], dtype="<u4"
    )
    return Hypervector(dim, words)
