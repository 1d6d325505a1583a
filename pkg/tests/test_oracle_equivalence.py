"""Dual-route checks: packed kernels against the plain-list reference.

Every operation runs down both routes on the same inputs and must agree bit
for bit.  The bulk randomized sweep lives in the acceptance suite; these are
the structured per-operation properties plus the small-instance full-chain
comparison.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdckit import bitvec as bv
from hdckit import encoders, memories, oracle
from hdckit import PipelineConfig, Trial, classify_trial, train

DIMS = st.sampled_from([1, 8, 31, 32, 33, 100])
SEEDS = st.integers(min_value=0, max_value=2**32)


def bits_of(hv):
    return bv.unpack_rows(hv.words[None, :], hv.dim)[0].tolist()


def from_bits(bits):
    return bv._wrap(len(bits), bv.pack_rows(np.array([bits], dtype=np.uint8))[0])


class TestPrimitiveEquivalence:
    @given(seed=SEEDS, index=st.integers(0, 2**16), dim=DIMS,
           balanced=st.booleans())
    @settings(max_examples=120, deadline=None)
    def test_random_generation(self, seed, index, dim, balanced):
        packed = bv.random_hypervector(seed, index, dim, balanced)
        assert bits_of(packed) == oracle.oracle_random(seed, index, dim, balanced)

    @given(seed=SEEDS, dim=DIMS)
    @settings(max_examples=80, deadline=None)
    def test_bind_complement(self, seed, dim):
        a, b = bv.random_hypervector(seed, 0, dim), bv.random_hypervector(seed, 1, dim)
        oa, ob = bits_of(a), bits_of(b)
        assert bits_of(bv.bind(a, b)) == oracle.oracle_bind(oa, ob)
        assert bits_of(bv.complement(a)) == oracle.oracle_complement(oa)

    @given(seed=SEEDS, dim=DIMS, k=st.integers(-400, 400))
    @settings(max_examples=120, deadline=None)
    def test_permute(self, seed, dim, k):
        a = bv.random_hypervector(seed, 0, dim)
        assert bits_of(bv.permute(a, k)) == oracle.oracle_permute(bits_of(a), k)

    @given(seed=SEEDS, dim=DIMS, data=st.data())
    @settings(max_examples=80, deadline=None)
    def test_bit_access_and_counts(self, seed, dim, data):
        a, b = bv.random_hypervector(seed, 0, dim), bv.random_hypervector(seed, 1, dim)
        oa, ob = bits_of(a), bits_of(b)
        j = data.draw(st.integers(0, dim - 1))
        v = data.draw(st.sampled_from([0, 1]))
        assert bv.extract_bit(a, j) == oracle.oracle_extract_bit(oa, j)
        assert bits_of(bv.insert_bit(a, j, v)) == oracle.oracle_insert_bit(oa, j, v)
        assert bv.popcount(a) == oracle.oracle_popcount(oa)
        assert bv.hamming(a, b) == oracle.oracle_hamming(oa, ob)

    @given(seed=SEEDS, dim=DIMS, members=st.integers(1, 7))
    @settings(max_examples=60, deadline=None)
    def test_bundle(self, seed, dim, members):
        vs = [bv.random_hypervector(seed, i, dim) for i in range(members)]
        tie = bv.random_hypervector(seed, 99, dim)
        acc = bv.Accumulator(dim)
        counts = [0] * dim
        for v in vs:
            acc = bv.accumulate(acc, v)
            counts = oracle.oracle_accumulate(counts, bits_of(v))
        packed = bv.threshold_majority(acc, tie)
        reference = oracle.oracle_threshold_majority(counts, members, bits_of(tie))
        assert bits_of(packed) == reference

    @given(seed=SEEDS, dim=DIMS)
    @settings(max_examples=60, deadline=None)
    def test_hex(self, seed, dim):
        a = bv.random_hypervector(seed, 0, dim)
        assert bv.to_hex(a) == oracle.oracle_to_hex(bits_of(a))
        assert oracle.oracle_from_hex(bv.to_hex(a)) == bits_of(a)

    def test_oracle_hex_rejects_dirty_padding(self):
        with pytest.raises(ValueError, match="padding"):
            oracle.oracle_from_hex("33:ffffffffffffffff")


class TestQuantizeEquivalence:
    @given(
        x=st.floats(-50, 50, allow_nan=False),
        levels=st.integers(2, 40),
    )
    @settings(max_examples=200, deadline=None)
    def test_quantize(self, x, levels):
        assert memories.quantize(x, -3.0, 17.0, levels) == oracle.oracle_quantize(
            x, -3.0, 17.0, levels
        )

    def test_half_rounds_up(self):
        # Midpoint between levels 0 and 1 on [0, 2] with 3 levels is 0.5.
        assert memories.quantize(0.5, 0.0, 2.0, 3) == 1
        assert oracle.oracle_quantize(0.5, 0.0, 2.0, 3) == 1

    def test_non_finite_rejected_both_routes(self):
        for x in (float("nan"), float("inf"), float("-inf")):
            with pytest.raises(ValueError):
                memories.quantize(x, 0.0, 1.0, 4)
            with pytest.raises(ValueError):
                oracle.oracle_quantize(x, 0.0, 1.0, 4)


class TestEncoderEquivalence:
    @given(seed=SEEDS, dim=DIMS, levels=st.integers(2, 12),
           channels=st.integers(1, 6), data=st.data())
    @settings(max_examples=50, deadline=None)
    def test_spatial(self, seed, dim, levels, channels, data):
        im = memories.ItemMemory(seed, channels, dim)
        cim = memories.ContinuousItemMemory(seed, levels, dim, 0.0, 1.0)
        idx = [data.draw(st.integers(0, levels - 1)) for _ in range(channels)]
        packed = encoders.spatial_encode(im, cim, idx)
        reference = oracle.oracle_spatial_encode(
            [bits_of(im.vector(c)) for c in range(channels)],
            [oracle.oracle_level_vectors(seed, dim, levels)[l] for l in idx],
        )
        assert bits_of(packed) == reference

    @given(seed=SEEDS, dim=DIMS, n=st.integers(1, 5))
    @settings(max_examples=50, deadline=None)
    def test_ngram(self, seed, dim, n):
        vs = [bv.random_hypervector(seed, i, dim) for i in range(n)]
        packed = encoders.ngram_encode(vs, n)
        reference = oracle.oracle_ngram_encode([bits_of(v) for v in vs], n)
        assert bits_of(packed) == reference

    @given(seed=SEEDS, dim=DIMS, levels=st.integers(2, 8))
    @settings(max_examples=30, deadline=None)
    def test_level_vectors(self, seed, dim, levels):
        cim = memories.ContinuousItemMemory(seed, levels, dim, 0.0, 1.0)
        reference = oracle.oracle_level_vectors(seed, dim, levels)
        for l in range(levels):
            assert bits_of(cim.vector(l)) == reference[l]


class TestFullChainEquivalence:
    """Train + classify on small instances, both routes, exact match."""

    @pytest.mark.parametrize("case", range(8))
    def test_chain(self, case):
        gen = np.random.default_rng(1000 + case)
        dim = int(gen.choice([16, 33, 100, 256]))
        channels = int(gen.integers(1, 6))
        levels = int(gen.integers(2, 9))
        ngram = int(gen.integers(1, 4))
        seed = int(gen.integers(0, 100000))
        length = int(gen.integers(ngram, 14))
        classes = int(gen.integers(2, 5))
        config = PipelineConfig(
            dim=dim, channels=channels, levels=levels, vmin=-2.0, vmax=2.0,
            ngram=ngram, seed=seed,
        )
        dataset = [
            Trial(f"c{k}", gen.uniform(-2.0, 2.0, (length, channels)))
            for k in range(classes)
            for _ in range(2)
        ]
        model = train(config, dataset, 1.0)
        labels, prototypes = oracle.oracle_train(
            [(t.label, t.samples.tolist()) for t in dataset],
            seed, dim, channels, levels, -2.0, 2.0, ngram,
        )
        assert list(model.am.labels) == labels
        for entry, proto in zip(model.am.entries, prototypes):
            assert bits_of(entry.vector) == proto

        probe = Trial("?", gen.uniform(-2.0, 2.0, (length, channels)))
        result = classify_trial(model, probe)
        ref_label, ref_windows = oracle.oracle_classify_trial(
            probe.samples.tolist(), labels, prototypes,
            seed, dim, channels, levels, -2.0, 2.0, ngram,
        )
        assert result.label == ref_label
        assert list(result.window_labels) == ref_windows
