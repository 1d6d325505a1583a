"""Estimator API: sklearn conventions, prediction behavior, encoder half."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hdckit.datasets import make_synthetic
from hdckit.estimator import HDClassifier, HDEncoder
from hdckit.pipeline import PipelineConfig, build_memories, encode_windows
from hdckit.validation import check_labels, check_recordings

PARAMS = dict(dim=512, levels=8, vmin=0.0, vmax=7.0, seed=5)


def _xy(noise=0.0, per_class=3, classes=3, length=10, seed=2):
    trials = make_synthetic(
        classes, 4, length, per_class, noise, seed=seed, levels=8, vmax=7.0
    )
    X = [t.samples for t in trials]
    y = [int(t.label.removeprefix("class")) for t in trials]
    return X, y


class TestValidationHelpers:
    def test_accepts_3d_array(self):
        X = np.zeros((3, 5, 2))
        blocks = check_recordings(X)
        assert len(blocks) == 3 and blocks[0].shape == (5, 2)

    def test_accepts_ragged_blocks(self):
        blocks = check_recordings([np.zeros((4, 2)), np.zeros((7, 2))])
        assert [b.shape[0] for b in blocks] == [4, 7]

    @pytest.mark.parametrize(
        "X, message",
        [
            (np.zeros((3, 5)), "3 dimensions"),
            ([], "no recordings"),
            ([np.zeros(4)], "recording 0 must be"),
            ([np.zeros((0, 2))], "recording 0 is empty"),
            ([np.zeros((4, 2)), np.zeros((4, 3))], "recording 1 has 3 channels"),
        ],
    )
    def test_bad_recordings(self, X, message):
        if isinstance(X, np.ndarray):
            message = "must be \\(recordings"
        with pytest.raises(ValueError, match=message):
            check_recordings(X)

    def test_labels_roundtrip_any_type(self):
        labels, keys = check_labels([1, "b", 2.5], 3)
        assert keys == ["1", "b", "2.5"]
        assert labels[0] == 1 and labels[2] == 2.5

    def test_label_length_mismatch(self):
        with pytest.raises(ValueError, match="2 recordings but y has 3"):
            check_labels([1, 2, 3], 2)

    def test_colliding_string_keys_rejected(self):
        with pytest.raises(ValueError, match="stringify"):
            check_labels([1, "1"], 2)


class TestHDClassifier:
    def test_params_roundtrip_and_clone(self):
        clf = HDClassifier(**PARAMS, ngram=2, n_jobs=2)
        got = clf.get_params()
        assert got["dim"] == 512 and got["ngram"] == 2 and got["n_jobs"] == 2
        other = clone(clf)
        assert other.get_params() == clf.get_params()
        clf.set_params(dim=256)
        assert clf.dim == 256

    def test_fit_predict_separable(self):
        X, y = _xy()
        clf = HDClassifier(**PARAMS).fit(X, y)
        assert clf.score(X, y) == 1.0
        assert list(clf.classes_) == [0, 1, 2]
        assert clf.n_features_in_ == 4

    def test_predict_preserves_label_values(self):
        X, y = _xy()
        pred = HDClassifier(**PARAMS).fit(X, y).predict(X[:2])
        assert pred.dtype.kind == "i"
        assert pred.tolist() == y[:2]

    def test_string_labels(self):
        X, _ = _xy()
        y = ["rest", "fist", "open"] * 3
        y.sort()
        clf = HDClassifier(**PARAMS).fit(X, y)
        assert set(clf.predict(X)) <= set(y)

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            HDClassifier().predict([np.zeros((4, 2))])

    def test_distances_shape_and_argmin(self):
        X, y = _xy(noise=0.7)
        clf = HDClassifier(**PARAMS).fit(X, y)
        d = clf.predict_distances(X)
        assert d.shape == (9, 3)
        pred = clf.predict(X)
        train_keys = clf.model_.am.labels
        for row, p in zip(d, pred):
            best_key = train_keys[int(np.argmin(row))]
            assert clf._label_of_key_[best_key] == p

    def test_window_predictions(self):
        X, y = _xy()
        clf = HDClassifier(**PARAMS).fit(X, y)
        wins = clf.predict_windows(X[:2])
        assert len(wins) == 2
        assert all(w.shape == (10,) for w in wins)
        assert set(wins[0]) <= {0, 1, 2}

    def test_n_jobs_does_not_change_predictions(self):
        X, y = _xy(noise=0.8)
        serial = HDClassifier(**PARAMS, n_jobs=None).fit(X, y)
        parallel = HDClassifier(**PARAMS, n_jobs=2).fit(X, y)
        assert serial.model_.to_json() == parallel.model_.to_json()
        assert list(serial.predict(X)) == list(parallel.predict(X))

    def test_channel_mismatch_at_predict(self):
        X, y = _xy()
        clf = HDClassifier(**PARAMS).fit(X, y)
        with pytest.raises(ValueError, match="channel-count mismatch"):
            clf.predict([np.zeros((6, 3))])


class TestHDEncoder:
    def test_transform_shape(self):
        X, _ = _xy()
        enc = HDEncoder(**PARAMS).fit(X)
        out = enc.transform(X[:3])
        assert len(out) == 3
        assert all(o.shape == (10, 16) and o.dtype == np.dtype("<u4") for o in out)

    def test_matches_pipeline_encoding(self):
        X, _ = _xy()
        enc = HDEncoder(**PARAMS, ngram=2).fit(X)
        direct = encode_windows(
            enc.config_, build_memories(enc.config_), X[0]
        )
        assert np.array_equal(enc.transform([X[0]])[0], direct)

    def test_fit_transform_and_clone(self):
        X, _ = _xy()
        enc = HDEncoder(**PARAMS)
        out = enc.fit_transform(X)
        assert len(out) == len(X)
        assert clone(enc).get_params() == enc.get_params()

    def test_unfitted_raises(self):
        with pytest.raises(NotFittedError):
            HDEncoder().transform([np.zeros((4, 2))])

    def test_channel_mismatch_at_transform(self):
        X, _ = _xy()
        enc = HDEncoder(**PARAMS).fit(X)
        with pytest.raises(ValueError, match="fitted for 4"):
            enc.transform([np.zeros((6, 3))])
