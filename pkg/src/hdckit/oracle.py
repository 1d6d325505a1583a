"""Plain-list reference implementations of every vector operation.

Everything here works on hypervectors represented as Python lists of 0/1 ints,
one entry per component, with explicit loops and no third-party code.  The
packed kernels in the rest of the library are validated against these
functions: any operation can be run down both routes and compared bit for bit,
up to and including the whole train-and-classify chain.

Slow by design.  Nothing outside the test suite should import this module for
real work.
"""

from __future__ import annotations

import hashlib
import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

SALT_WORDS = 0
SALT_BALANCE = 1
SALT_ORDER = 2


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MULT1) & _MASK64
    x = ((x ^ (x >> 27)) * _MULT2) & _MASK64
    return x ^ (x >> 31)


def _stream_u64(seed: int, salt: int, index: int, count: int) -> list[int]:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    h = _mix64(seed)
    h = _mix64(h ^ ((salt * _GOLDEN) & _MASK64))
    h = _mix64(h ^ ((index * _GOLDEN) & _MASK64))
    return [_mix64((h + i * _GOLDEN) & _MASK64) for i in range(1, count + 1)]


def _stream_order(seed: int, salt: int, index: int, n: int) -> list[int]:
    keys = _stream_u64(seed, salt, index, n)
    return sorted(range(n), key=keys.__getitem__)


def oracle_random(seed: int, index: int, dim: int, balanced: bool = False) -> list[int]:
    """Bits of the deterministic random vector for the (seed, index) slot."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if balanced:
        order = _stream_order(seed, SALT_BALANCE, index, dim)
        bits = [0] * dim
        for pos in order[: dim // 2]:
            bits[pos] = 1
        return bits
    nwords = (dim + 31) // 32
    words = [w & 0xFFFFFFFF for w in _stream_u64(seed, SALT_WORDS, index, nwords)]
    return [(words[j // 32] >> (j % 32)) & 1 for j in range(dim)]


def oracle_bind(a: list[int], b: list[int]) -> list[int]:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return [x ^ y for x, y in zip(a, b)]


def oracle_complement(a: list[int]) -> list[int]:
    return [1 - x for x in a]


def oracle_permute(a: list[int], k: int) -> list[int]:
    dim = len(a)
    return [a[(j - k) % dim] for j in range(dim)]


def oracle_extract_bit(a: list[int], j: int) -> int:
    if not 0 <= j < len(a):
        raise IndexError(f"bit index {j} out of range for dim {len(a)}")
    return a[j]


def oracle_insert_bit(a: list[int], j: int, v: int) -> list[int]:
    if not 0 <= j < len(a):
        raise IndexError(f"bit index {j} out of range for dim {len(a)}")
    if v not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {v}")
    out = list(a)
    out[j] = v
    return out


def oracle_popcount(a: list[int]) -> int:
    total = 0
    for x in a:
        total += x
    return total


def oracle_hamming(a: list[int], b: list[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    total = 0
    for x, y in zip(a, b):
        if x != y:
            total += 1
    return total


def oracle_accumulate(counts: list[int], v: list[int]) -> list[int]:
    if len(counts) != len(v):
        raise ValueError(f"dimension mismatch: {len(counts)} vs {len(v)}")
    return [c + x for c, x in zip(counts, v)]


def oracle_threshold_majority(
    counts: list[int], total: int, tiebreak: list[int] | None
) -> list[int]:
    if total < 1:
        raise ValueError("cannot take a majority over an empty bundle")
    if total % 2 == 0 and tiebreak is None:
        raise ValueError("even-sized bundle needs a tiebreak vector")
    out = []
    for j, c in enumerate(counts):
        if 2 * c > total:
            out.append(1)
        elif 2 * c < total:
            out.append(0)
        else:
            out.append(tiebreak[j])
    return out


def oracle_to_hex(a: list[int]) -> str:
    dim = len(a)
    nwords = (dim + 31) // 32
    parts = [f"{dim}:"]
    for w in range(nwords):
        value = 0
        for i in range(32):
            j = 32 * w + i
            if j < dim and a[j]:
                value |= 1 << i
        parts.append(f"{value:08x}")
    return "".join(parts)


def oracle_from_hex(text: str) -> list[int]:
    head, sep, body = text.partition(":")
    if not sep:
        raise ValueError("hex hypervector must look like '<dim>:<hexwords>'")
    dim = int(head)
    nwords = (dim + 31) // 32
    if len(body) != 8 * nwords:
        raise ValueError(
            f"expected {8 * nwords} hex digits for dim {dim}, got {len(body)}"
        )
    bits = []
    for j in range(dim):
        word = int(body[8 * (j // 32) : 8 * (j // 32) + 8], 16)
        bits.append((word >> (j % 32)) & 1)
    for j in range(dim, 32 * nwords):
        word = int(body[8 * (j // 32) : 8 * (j // 32) + 8], 16)
        if (word >> (j % 32)) & 1:
            raise ValueError("padding bits beyond the dimension must be zero")
    return bits


# ---------------------------------------------------------------------------
# Reference encoders, built only from the primitives above


def oracle_quantize(x: float, vmin: float, vmax: float, levels: int) -> int:
    """Nearest level index for x on the [vmin, vmax] scale, halves rounding up."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels}")
    if not vmin < vmax:
        raise ValueError(f"empty value range: [{vmin}, {vmax}]")
    t = (x - vmin) / (vmax - vmin) * (levels - 1)
    q = math.floor(t + 0.5)
    return min(max(q, 0), levels - 1)


def oracle_level_vectors(seed: int, dim: int, levels: int) -> list[list[int]]:
    """Level vectors built by progressively flipping disjoint position blocks.

    Level 0 is a random endpoint; each step toward the top level flips a fresh
    block of previously untouched positions, dim // 2 positions in total, with
    block sizes as even as possible and the remainder going to the earliest
    steps.  Adjacent levels therefore differ by one block, and the two
    endpoints differ in exactly dim // 2 positions.
    """
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels}")
    current = oracle_random(seed, _INDEX_LEVEL_BASE, dim)
    order = _stream_order(seed, SALT_ORDER, _INDEX_LEVEL_BASE, dim)
    total = dim // 2
    steps = levels - 1
    block = total // steps
    remainder = total % steps
    out = [list(current)]
    offset = 0
    for s in range(steps):
        size = block + (1 if s < remainder else 0)
        for pos in order[offset : offset + size]:
            current[pos] = 1 - current[pos]
        offset += size
        out.append(list(current))
    return out


def oracle_spatial_encode(
    channel_vectors: list[list[int]], level_vectors: list[list[int]]
) -> list[int]:
    """Bundle of each channel's vector bound to its sample's level vector.

    With an even channel count, the bind of the first two bound vectors is
    bundled in as well, which makes the vote count odd so no component ties.
    """
    n = len(channel_vectors)
    if n < 1 or n != len(level_vectors):
        raise ValueError("need one level vector per channel")
    bound = [oracle_bind(c, l) for c, l in zip(channel_vectors, level_vectors)]
    if n % 2 == 0:
        bound.append(oracle_bind(bound[0], bound[1]))
    counts = [0] * len(bound[0])
    for v in bound:
        counts = oracle_accumulate(counts, v)
    return oracle_threshold_majority(counts, len(bound), None)


def oracle_ngram_encode(spatials: list[list[int]], n: int) -> list[int]:
    """XOR of n consecutive spatial vectors, each rotated by its age.

    The oldest vector is unrotated; the vector k steps later is rotated k
    positions upward before the XOR.
    """
    if n < 1:
        raise ValueError(f"window length must be >= 1, got {n}")
    if len(spatials) != n:
        raise ValueError(f"expected {n} spatial vectors, got {len(spatials)}")
    out = list(spatials[0])
    for k in range(1, n):
        out = oracle_bind(out, oracle_permute(spatials[k], k))
    return out


def oracle_am_query(query: list[int], class_vectors: list[list[int]]) -> tuple[int, list[int]]:
    """(winning class index, all Hamming distances); ties go to the lowest index."""
    if not class_vectors:
        raise ValueError("associative memory has no classes")
    distances = [oracle_hamming(query, c) for c in class_vectors]
    best = 0
    for i in range(1, len(distances)):
        if distances[i] < distances[best]:
            best = i
    return best, distances


# ---------------------------------------------------------------------------
# Full train-and-classify chain

# The two stream slots the packed library reserves for internal vectors.
_INDEX_LEVEL_BASE = 1 << 62
_INDEX_QUERY_TIE = (1 << 62) + 1


def _oracle_label_slot(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def oracle_memories(
    seed: int, dim: int, channels: int, levels: int
) -> tuple[list[list[int]], list[list[int]]]:
    """(channel vectors, level vectors) for a config seed."""
    im = [oracle_random(seed, c, dim) for c in range(channels)]
    cim = oracle_level_vectors(seed, dim, levels)
    return im, cim


def oracle_encode_trial(
    samples: list[list[float]],
    im: list[list[int]],
    cim: list[list[int]],
    vmin: float,
    vmax: float,
    ngram: int,
) -> list[list[int]]:
    """All sliding-window vectors of one trial, via the reference route only."""
    levels = len(cim)
    spatials = []
    for row in samples:
        level_vectors = [cim[oracle_quantize(x, vmin, vmax, levels)] for x in row]
        spatials.append(oracle_spatial_encode(im, level_vectors))
    return [
        oracle_ngram_encode(spatials[t : t + ngram], ngram)
        for t in range(len(spatials) - ngram + 1)
    ]


def oracle_train(
    trials: list[tuple[str, list[list[float]]]],
    seed: int,
    dim: int,
    channels: int,
    levels: int,
    vmin: float,
    vmax: float,
    ngram: int,
) -> tuple[list[str], list[list[int]]]:
    """(class labels in first-seen order, their prototype vectors)."""
    im, cim = oracle_memories(seed, dim, channels, levels)
    order: list[str] = []
    counts: dict[str, list[int]] = {}
    totals: dict[str, int] = {}
    for label, samples in trials:
        windows = oracle_encode_trial(samples, im, cim, vmin, vmax, ngram)
        if label not in counts:
            order.append(label)
            counts[label] = [0] * dim
            totals[label] = 0
        for w in windows:
            counts[label] = oracle_accumulate(counts[label], w)
        totals[label] += len(windows)
    prototypes = []
    for label in order:
        tie = None
        if totals[label] % 2 == 0:
            tie = oracle_random(seed, _oracle_label_slot(label), dim)
        prototypes.append(oracle_threshold_majority(counts[label], totals[label], tie))
    return order, prototypes


def oracle_classify_trial(
    samples: list[list[float]],
    labels: list[str],
    prototypes: list[list[int]],
    seed: int,
    dim: int,
    channels: int,
    levels: int,
    vmin: float,
    vmax: float,
    ngram: int,
) -> tuple[str, list[str]]:
    """(bundled-query label, per-window labels) via the reference route only."""
    im, cim = oracle_memories(seed, dim, channels, levels)
    windows = oracle_encode_trial(samples, im, cim, vmin, vmax, ngram)
    counts = [0] * dim
    for w in windows:
        counts = oracle_accumulate(counts, w)
    tie = None
    if len(windows) % 2 == 0:
        tie = oracle_random(seed, _INDEX_QUERY_TIE, dim)
    query = oracle_threshold_majority(counts, len(windows), tie)
    best, _ = oracle_am_query(query, prototypes)
    window_labels = [
        labels[oracle_am_query(w, prototypes)[0]] for w in windows
    ]
    return labels[best], window_labels


# ---------------------------------------------------------------------------
# Dispatcher for randomized equivalence sweeps

OPS = (
    "random",
    "random_balanced",
    "bind",
    "complement",
    "permute",
    "extract_bit",
    "insert_bit",
    "popcount",
    "hamming",
    "bundle",
    "hex_roundtrip",
)


def oracle_op(name: str, **kw):
    """Run one named operation down the reference route."""
    if name == "random":
        return oracle_random(kw["seed"], kw["index"], kw["dim"])
    if name == "random_balanced":
        return oracle_random(kw["seed"], kw["index"], kw["dim"], balanced=True)
    if name == "bind":
        return oracle_bind(kw["a"], kw["b"])
    if name == "complement":
        return oracle_complement(kw["a"])
    if name == "permute":
        return oracle_permute(kw["a"], kw["k"])
    if name == "extract_bit":
        return oracle_extract_bit(kw["a"], kw["j"])
    if name == "insert_bit":
        return oracle_insert_bit(kw["a"], kw["j"], kw["v"])
    if name == "popcount":
        return oracle_popcount(kw["a"])
    if name == "hamming":
        return oracle_hamming(kw["a"], kw["b"])
    if name == "bundle":
        counts = [0] * len(kw["vs"][0])
        for v in kw["vs"]:
            counts = oracle_accumulate(counts, v)
        return oracle_threshold_majority(counts, len(kw["vs"]), kw.get("tiebreak"))
    if name == "hex_roundtrip":
        return oracle_from_hex(oracle_to_hex(kw["a"]))
    raise ValueError(f"unknown operation {name!r}")
