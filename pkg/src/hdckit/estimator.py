"""Scikit-learn estimator wrappers around the pipeline.

:class:`HDClassifier` is a fit/predict classifier over multichannel
recordings; :class:`HDEncoder` is the fit/transform half that stops at packed
window vectors.  Both follow scikit-learn conventions (constructor stores
parameters verbatim, ``get_params`` round-trips, fitted state carries a
trailing underscore) so they compose with model selection utilities; X is a
sequence of (timestamps, channels) blocks rather than a flat feature table.
"""

from __future__ import annotations

import numpy as np
from joblib import effective_n_jobs
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .datasets import Trial
from .pipeline import (
    Memories,
    Model,
    PipelineConfig,
    build_memories,
    classify_dataset,
    encode_windows,
    train,
)
from .validation import check_labels, check_recordings


def _natural_array(values: list) -> np.ndarray:
    """1D label array with numpy's inferred dtype; object only when mixed."""
    try:
        arr = np.asarray(values)
    except ValueError:
        arr = None
    if arr is None or arr.ndim != 1:
        arr = np.empty(len(values), dtype=object)
        arr[:] = values
    return arr


class HDClassifier(ClassifierMixin, BaseEstimator):
    """Hypervector classifier: encode recordings, compare to class prototypes.

    Parameters mirror the pipeline config; `channels` is inferred from X at
    fit time.  `n_jobs` follows joblib conventions (None = 1, -1 = all
    cores); it affects speed only, never the fitted model or predictions.
    """

    def __init__(
        self,
        dim: int = 10000,
        levels: int = 22,
        vmin: float = 0.0,
        vmax: float = 21.0,
        ngram: int = 1,
        seed: int = 1,
        n_jobs: int | None = None,
    ):
        self.dim = dim
        self.levels = levels
        self.vmin = vmin
        self.vmax = vmax
        self.ngram = ngram
        self.seed = seed
        self.n_jobs = n_jobs

    def _config(self, channels: int) -> PipelineConfig:
        return PipelineConfig(
            dim=self.dim,
            channels=channels,
            levels=self.levels,
            vmin=self.vmin,
            vmax=self.vmax,
            ngram=self.ngram,
            seed=self.seed,
            workers=effective_n_jobs(self.n_jobs),
        )

    def fit(self, X, y) -> "HDClassifier":
        """Learn one prototype per class from all given recordings."""
        blocks = check_recordings(X)
        labels, keys = check_labels(y, len(blocks))
        trials = [Trial(key, block) for key, block in zip(keys, blocks)]
        self.model_ = train(self._config(blocks[0].shape[1]), trials, 1.0)
        self._label_of_key_ = {}
        for key, value in zip(keys, labels):
            self._label_of_key_.setdefault(key, value)
        self.classes_ = np.unique(_natural_array(list(labels)))
        self.n_features_in_ = blocks[0].shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        """Bundled-query class per recording."""
        check_is_fitted(self, "model_")
        results = self._classify(X)
        return _natural_array([self._label_of_key_[r.label] for r in results])

    def predict_distances(self, X) -> np.ndarray:
        """(recordings, classes) Hamming distances, columns in training order.

        Column labels are ``model_.am.labels`` mapped through the original
        label values; smaller distance means closer to that class.
        """
        check_is_fitted(self, "model_")
        return np.asarray([r.distances for r in self._classify(X)], dtype=np.int64)

    def predict_windows(self, X) -> list[np.ndarray]:
        """Per-window class labels for each recording, for diagnostics."""
        check_is_fitted(self, "model_")
        return [
            _natural_array([self._label_of_key_[w] for w in r.window_labels])
            for r in self._classify(X)
        ]

    def _classify(self, X):
        blocks = check_recordings(X)
        trials = [Trial("?", block) for block in blocks]
        return classify_dataset(
            self.model_, trials, workers=effective_n_jobs(self.n_jobs)
        )


class HDEncoder(TransformerMixin, BaseEstimator):
    """Fit/transform front half: recordings to packed window vectors.

    ``transform`` returns one ``(windows, ceil(dim / 32))`` uint32 array per
    recording; rows are the trial's sliding-window vectors.
    """

    def __init__(
        self,
        dim: int = 10000,
        levels: int = 22,
        vmin: float = 0.0,
        vmax: float = 21.0,
        ngram: int = 1,
        seed: int = 1,
    ):
        self.dim = dim
        self.levels = levels
        self.vmin = vmin
        self.vmax = vmax
        self.ngram = ngram
        self.seed = seed

    def fit(self, X, y=None) -> "HDEncoder":
        blocks = check_recordings(X)
        self.config_ = PipelineConfig(
            dim=self.dim,
            channels=blocks[0].shape[1],
            levels=self.levels,
            vmin=self.vmin,
            vmax=self.vmax,
            ngram=self.ngram,
            seed=self.seed,
        )
        self.memories_: Memories = build_memories(self.config_)
        self.n_features_in_ = blocks[0].shape[1]
        return self

    def transform(self, X) -> list[np.ndarray]:
        check_is_fitted(self, "config_")
        blocks = check_recordings(X)
        out = []
        for i, block in enumerate(blocks):
            if block.shape[1] != self.config_.channels:
                raise ValueError(
                    f"recording {i} has {block.shape[1]} channels,"
                    f" fitted for {self.config_.channels}"
                )
            out.append(encode_windows(self.config_, self.memories_, block))
        return out
