"""scikit-learn style wrappers around the recognition pipeline.

``X`` is always a sequence of 2-D ``uint8`` line images (0 = ink) and ``y``
a sequence of ground-truth strings, so the pieces fit into
``sklearn.pipeline`` and ``sklearn.base.clone``.
"""

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .codec import LabelAlphabet, default_alphabet, load_alphabet
from .evaluation import score_corpus
from .exceptions import RejectedInputError
from .modelio import load_model, save_model
from .preprocessing import LINE_HEIGHT, check_gray_image, extract_features, normalize_line
from .recognition import recognize_line
from .synth import LineRecord
from .trainer import TrainConfig, train


def check_line_images(X):
    """Validate a batch of line images; returns a list of uint8 arrays."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        raise RejectedInputError("X must be a sequence of images, not a single image")
    images = [check_gray_image(img, f"X[{k}]") for k, img in enumerate(X)]
    if not images:
        raise RejectedInputError("X is empty")
    return images


def check_texts(y, n):
    texts = list(y)
    if len(texts) != n:
        raise RejectedInputError(f"got {n} images but {len(texts)} texts")
    for k, t in enumerate(texts):
        if not isinstance(t, str):
            raise RejectedInputError(f"y[{k}] is not a string")
    return texts


def _resolve_alphabet(alphabet):
    if alphabet is None:
        return default_alphabet()
    if isinstance(alphabet, LabelAlphabet):
        return alphabet
    return load_alphabet(alphabet, strict_count=False)


class LineNormalizer(TransformerMixin, BaseEstimator):
    """Rescale every line image to a fixed height (48 by default)."""

    def __init__(self, height=LINE_HEIGHT):
        self.height = height

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return [normalize_line(img, self.height) for img in check_line_images(X)]


class ColumnFeatures(TransformerMixin, BaseEstimator):
    """Height-48 line images to ``(width, 48)`` feature arrays in [0, 1]."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return [extract_features(img) for img in check_line_images(X)]


class BlstmCtcRecognizer(BaseEstimator):
    """Single-layer BLSTM with a CTC output, trained one line at a time.

    Parameters mirror :class:`~blstm_ocr.trainer.TrainConfig`; ``alphabet``
    is a :class:`LabelAlphabet`, a manifest path, or ``None`` for the
    default Bengali + English table.
    """

    def __init__(self, alphabet=None, hidden_size=128, learning_rate=1e-4, momentum=0.9,
                 max_epochs=80, loss_delta_stop=0.01, val_delta_stop=0.1, seed=0,
                 shuffle=True, grad_clip=None, beam_width=10):
        self.alphabet = alphabet
        self.hidden_size = hidden_size
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.max_epochs = max_epochs
        self.loss_delta_stop = loss_delta_stop
        self.val_delta_stop = val_delta_stop
        self.seed = seed
        self.shuffle = shuffle
        self.grad_clip = grad_clip
        self.beam_width = beam_width

    def _config(self):
        return TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            max_epochs=self.max_epochs,
            loss_delta_stop=self.loss_delta_stop,
            val_delta_stop=self.val_delta_stop,
            hidden_size=self.hidden_size,
            seed=self.seed,
            shuffle=self.shuffle,
            grad_clip=self.grad_clip,
        )

    def fit(self, X, y, X_val=None, y_val=None):
        images = check_line_images(X)
        texts = check_texts(y, len(images))
        records = [LineRecord(img, t, f"train-{k}") for k, (img, t) in enumerate(zip(images, texts))]
        val = []
        if X_val is not None:
            val_images = check_line_images(X_val)
            val_texts = check_texts(y_val, len(val_images))
            val = [LineRecord(img, t, f"val-{k}") for k, (img, t) in enumerate(zip(val_images, val_texts))]
        self.alphabet_ = _resolve_alphabet(self.alphabet)
        result = train(records, val, self.alphabet_, self._config())
        self.model_ = result.model
        self.epoch_reports_ = result.reports
        self.best_epoch_ = result.best_epoch
        self.issues_ = result.issues
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError(
                f"This {type(self).__name__} instance is not fitted yet; call `fit` first."
            )

    def predict(self, X):
        self._check_fitted()
        return [recognize_line(self.model_, self.alphabet_, img, self.beam_width)
                for img in check_line_images(X)]

    def score(self, X, y):
        """Character accuracy (percent) on ``(X, y)``."""
        images = check_line_images(X)
        texts = check_texts(y, len(images))
        return score_corpus(zip(self.predict(images), texts)).ca_percent

    def save(self, path):
        self._check_fitted()
        save_model(self.model_, self.alphabet_, path)

    @classmethod
    def load(cls, path, beam_width=10):
        model, alphabet = load_model(Path(path))
        est = cls(alphabet=alphabet, hidden_size=model.hidden_size, beam_width=beam_width)
        est.model_ = model
        est.alphabet_ = alphabet
        return est
