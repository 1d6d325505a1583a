"""Spatial and temporal encoders.

The spatial encoder turns one multichannel sample into a hypervector: each
channel's id vector is bound (XOR) to the level vector of that channel's
quantized reading, and the bound vectors are bundled by componentwise
majority.  With an even channel count the bind of the first two bound vectors
joins the bundle, making the vote count odd so no component ever ties.

The temporal encoder turns n consecutive spatial vectors into one n-gram
vector: the vector k steps after the window start is rotated k positions
upward and all n are XORed together.  Rotation makes the n-gram sensitive to
order; XOR keeps it invertible and cheap.

Batch variants process whole sample streams at once and are what the pipeline
uses; the single-shot functions wrap them.  Both routes produce bit-identical
vectors and account identical operation units.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .bitvec import Hypervector, _wrap, op_counter, rotate_rows, unpack_rows
from .memories import ContinuousItemMemory, ItemMemory

# Unpacked working set per chunk (counts plus one bound row), in bytes.  A
# byte budget rather than a row count keeps the per-component cost flat
# across dimensions: every chunk stays at the same cache tier, so wall time
# stays linear in the dimension instead of bending where the set outgrows L2.
_CHUNK_BUDGET = 4 << 20


def _chunk_rows(dim: int, bytes_per_component: int) -> int:
    return max(16, min(4096, _CHUNK_BUDGET // (bytes_per_component * dim)))


def _check_pair(im: ItemMemory, cim: ContinuousItemMemory) -> None:
    if im.dim != cim.dim:
        raise ValueError(f"dimension mismatch: ids {im.dim} vs levels {cim.dim}")


def spatial_encode_batch(
    im: ItemMemory, cim: ContinuousItemMemory, level_rows: np.ndarray
) -> np.ndarray:
    """Encode each row of quantized levels to one packed spatial vector.

    Args:
        im: per-channel id vectors; its count fixes the channel count.
        cim: level vectors shared by all channels.
        level_rows: (samples, channels) integer level indices.

    Returns:
        (samples, words) packed '<u4' array, one spatial vector per row.
    """
    _check_pair(im, cim)
    level_rows = np.asarray(level_rows)
    if level_rows.ndim != 2 or level_rows.shape[1] != im.count:
        raise ValueError(
            f"expected (samples, {im.count}) level indices, got {level_rows.shape}"
        )
    if not np.issubdtype(level_rows.dtype, np.integer):
        raise ValueError(f"level indices must be integers, got {level_rows.dtype}")
    if level_rows.size and (
        level_rows.min() < 0 or level_rows.max() >= cim.levels
    ):
        raise ValueError(f"level indices must lie in [0, {cim.levels - 1}]")
    dim = im.dim
    n_ch = im.count
    votes = n_ch + 1 if n_ch % 2 == 0 else n_ch
    total = level_rows.shape[0]
    out = np.empty((total, im.words.shape[1]), dtype="<u4")
    step = _chunk_rows(dim, 3)  # int16 counts + uint8 bound row
    for lo in range(0, total, step):
        rows = level_rows[lo : lo + step]
        counts = np.zeros((rows.shape[0], dim), dtype=np.int16)
        first = second = None
        for c in range(n_ch):
            bound = im.words[c] ^ cim.words[rows[:, c]]
            if n_ch % 2 == 0:
                if c == 0:
                    first = bound
                elif c == 1:
                    second = bound
            counts += unpack_rows(bound, dim)
        if n_ch % 2 == 0:
            counts += unpack_rows(first ^ second, dim)
        bits = (2 * counts > votes).view(np.uint8)
        out[lo : lo + rows.shape[0]] = _pack_chunk(bits, out.shape[1])
    op_counter().add(total * dim * (2 * votes + 1))
    return out


def _pack_chunk(bits: np.ndarray, nwords: int) -> np.ndarray:
    packed = np.packbits(bits, axis=1, bitorder="little")
    if packed.shape[1] < nwords * 4:
        pad = np.zeros((bits.shape[0], nwords * 4 - packed.shape[1]), dtype=np.uint8)
        packed = np.hstack([packed, pad])
    return packed.view("<u4")


def spatial_encode(
    im: ItemMemory, cim: ContinuousItemMemory, levels: Sequence[int]
) -> Hypervector:
    """One multichannel sample's spatial vector from its per-channel levels."""
    rows = np.asarray(levels, dtype=np.int64)[None, :]
    return _wrap(im.dim, spatial_encode_batch(im, cim, rows)[0])


def ngram_encode_batch(spatial_words: np.ndarray, n: int, dim: int) -> np.ndarray:
    """All length-n window vectors of a packed spatial stream.

    Window t covers samples t .. t+n-1; sample t+k enters rotated k positions
    upward, the oldest unrotated.  A stream of T samples yields T - n + 1
    windows.

    Returns:
        (T - n + 1, words) packed '<u4' array.
    """
    if n < 1:
        raise ValueError(f"window length must be >= 1, got {n}")
    total = spatial_words.shape[0]
    if total < n:
        raise ValueError(f"need at least {n} samples for one window, got {total}")
    n_windows = total - n + 1
    out = np.array(spatial_words[:n_windows], dtype="<u4", copy=True)
    for k in range(1, n):
        out ^= rotate_rows(spatial_words[k : k + n_windows], k, dim)
    op_counter().add(n_windows * dim * 2 * (n - 1))
    return out


def ngram_encode(spatials: Sequence[Hypervector], n: int) -> Hypervector:
    """One window's n-gram vector from its n spatial vectors, oldest first."""
    if n < 1:
        raise ValueError(f"window length must be >= 1, got {n}")
    if len(spatials) != n:
        raise ValueError(f"expected {n} spatial vectors, got {len(spatials)}")
    dim = spatials[0].dim
    for v in spatials:
        if v.dim != dim:
            raise ValueError(f"dimension mismatch: {dim} vs {v.dim}")
    words = np.vstack([v.words for v in spatials])
    return _wrap(dim, ngram_encode_batch(words, n, dim)[0])
