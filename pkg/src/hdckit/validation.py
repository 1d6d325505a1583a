"""Input validation for the estimator API.

The estimators accept multichannel recordings, not flat feature tables: one
sample is a (timestamps, channels) block, and X is a sequence of such blocks
(or a 3D array when every recording has the same length).  These helpers
normalize and validate that shape once so the estimators stay thin.
"""

from __future__ import annotations

import numpy as np


def check_recordings(X) -> list[np.ndarray]:
    """Normalize X to a list of (timestamps, channels) float64 arrays.

    Accepts a 3D array (recordings, timestamps, channels) or any sequence of
    2D blocks; every block must share the channel count and hold at least one
    timestamp.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 3:
            raise ValueError(
                f"array X must be (recordings, timestamps, channels),"
                f" got {X.ndim} dimensions"
            )
        blocks = [X[i] for i in range(X.shape[0])]
    else:
        blocks = list(X)
    if not blocks:
        raise ValueError("X has no recordings")
    out = []
    for i, block in enumerate(blocks):
        arr = np.asarray(block, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(
                f"recording {i} must be (timestamps, channels),"
                f" got {arr.ndim} dimensions"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"recording {i} is empty: shape {arr.shape}")
        out.append(arr)
    channels = out[0].shape[1]
    for i, arr in enumerate(out):
        if arr.shape[1] != channels:
            raise ValueError(
                f"recording {i} has {arr.shape[1]} channels, expected {channels}"
            )
    return out


def check_labels(y, n_recordings: int) -> tuple[np.ndarray, list[str]]:
    """Validate y against X and derive the internal string key per label.

    Returns the labels as a 1D object array plus their string keys.  Distinct
    label values must map to distinct strings, since models store labels as
    text.
    """
    labels = np.asarray(y, dtype=object).ravel()
    if labels.shape[0] != n_recordings:
        raise ValueError(
            f"X has {n_recordings} recordings but y has {labels.shape[0]} labels"
        )
    keys = [str(v) for v in labels]
    reverse: dict[str, object] = {}
    for key, value in zip(keys, labels):
        if key in reverse and reverse[key] != value:
            raise ValueError(
                f"labels {reverse[key]!r} and {value!r} both stringify to {key!r}"
            )
        reverse[key] = value
    return labels, keys
