"""Bit-packed binary hypervector computing.

Ten-thousand-dimensional binary vectors packed into 32-bit words, the three
algebra operations on them (XOR binding, majority bundling, rotation), item
memories for symbols and quantized levels, spatial and temporal encoders, an
associative-memory classifier, and a benchmark harness that demonstrates the
linear scaling of the whole chain.  Every derived vector is a pure function
of a seed, so models persist as seeds plus per-class state and reload
bit-exactly; parallel execution never changes any output bit.
"""

from .am import AssociativeMemory
from .bitvec import (
    Accumulator,
    Hypervector,
    accumulate,
    bind,
    complement,
    count_ops,
    extract_bit,
    from_hex,
    hamming,
    insert_bit,
    op_counter,
    permute,
    popcount,
    random_hypervector,
    threshold_majority,
    to_hex,
    words_for,
    zero_hypervector,
)
from .datasets import Trial, load_csv, make_synthetic, save_csv, split_train_eval
from .encoders import ngram_encode, spatial_encode
from .estimator import HDClassifier, HDEncoder
from .memories import ContinuousItemMemory, ItemMemory, quantize
from .pipeline import (
    Memories,
    Model,
    PipelineConfig,
    TrialResult,
    build_memories,
    classify_dataset,
    classify_trial,
    encode_trial,
    encode_windows,
    footprint,
    train,
)
from .sweeps import (
    DegradationRow,
    SweepReport,
    SweepRow,
    SweepSpec,
    degradation_table,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Accumulator",
    "AssociativeMemory",
    "ContinuousItemMemory",
    "DegradationRow",
    "HDClassifier",
    "HDEncoder",
    "Hypervector",
    "ItemMemory",
    "Memories",
    "Model",
    "PipelineConfig",
    "SweepReport",
    "SweepRow",
    "SweepSpec",
    "Trial",
    "TrialResult",
    "accumulate",
    "bind",
    "build_memories",
    "classify_dataset",
    "classify_trial",
    "complement",
    "count_ops",
    "degradation_table",
    "encode_trial",
    "encode_windows",
    "extract_bit",
    "footprint",
    "from_hex",
    "hamming",
    "insert_bit",
    "load_csv",
    "make_synthetic",
    "ngram_encode",
    "op_counter",
    "permute",
    "popcount",
    "quantize",
    "random_hypervector",
    "run_sweep",
    "save_csv",
    "spatial_encode",
    "split_train_eval",
    "threshold_majority",
    "to_hex",
    "train",
    "words_for",
    "zero_hypervector",
]
