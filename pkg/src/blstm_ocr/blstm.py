"""Single bidirectional LSTM layer with a linear per-frame output.

For each frame ``t``::

    y_t = W_fy h_fwd[t] + W_by h_bwd[t] + b_y

where ``h_bwd`` comes from running the backward bank over the reversed
sequence and reversing its outputs back.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import RejectedInputError
from .lstm import LstmParams, lstm_backward, lstm_forward
from .numeric import make_rng, xavier_init


@dataclass
class BlstmModel:
    fwd: LstmParams
    bwd: LstmParams
    W_fy: np.ndarray
    W_by: np.ndarray
    b_y: np.ndarray

    def __post_init__(self):
        self.W_fy = np.asarray(self.W_fy, dtype=np.float64)
        self.W_by = np.asarray(self.W_by, dtype=np.float64)
        self.b_y = np.asarray(self.b_y, dtype=np.float64)
        H, C = self.hidden_size, self.num_classes
        if (self.bwd.hidden_size, self.bwd.input_size) != (H, self.input_size):
            raise RejectedInputError("forward and backward banks differ in shape")
        if self.W_fy.shape != (C, H) or self.W_by.shape != (C, H):
            raise RejectedInputError(
                f"output weights must be ({C}, {H}), got {self.W_fy.shape}, {self.W_by.shape}"
            )

    @property
    def input_size(self):
        return self.fwd.input_size

    @property
    def hidden_size(self):
        return self.fwd.hidden_size

    @property
    def num_classes(self):
        return self.b_y.shape[0]

    def arrays(self):
        """All parameter arrays in the fixed order used for I/O and updates."""
        return self.fwd.arrays() + self.bwd.arrays() + [self.W_fy, self.W_by, self.b_y]

    def copy(self):
        return BlstmModel(
            self.fwd.copy(), self.bwd.copy(), self.W_fy.copy(), self.W_by.copy(), self.b_y.copy()
        )

    def zeros_like(self):
        return BlstmModel(
            LstmParams.zeros(self.input_size, self.hidden_size),
            LstmParams.zeros(self.input_size, self.hidden_size),
            np.zeros_like(self.W_fy),
            np.zeros_like(self.W_by),
            np.zeros_like(self.b_y),
        )

    @classmethod
    def from_arrays(cls, arrays, input_size, hidden_size, num_classes):
        arrays = list(arrays)
        n = len(LstmParams.zeros(1, 1).arrays())
        model = cls(
            LstmParams(*arrays[:n]),
            LstmParams(*arrays[n : 2 * n]),
            *arrays[2 * n :],
        )
        if (model.input_size, model.hidden_size, model.num_classes) != (
            input_size,
            hidden_size,
            num_classes,
        ):
            raise RejectedInputError("array shapes disagree with the declared dimensions")
        return model


@dataclass
class BlstmTapes:
    fwd: object
    bwd: object  # recorded on the reversed timeline

    def __len__(self):
        return len(self.fwd)


def blstm_init(input_size=48, hidden_size=128, num_classes=166, seed=0):
    """Xavier-uniform weights (per-matrix fans), zero biases."""
    if min(input_size, hidden_size, num_classes) < 1:
        raise RejectedInputError("all sizes must be >= 1")
    rng = make_rng(seed)
    fwd = LstmParams.xavier(input_size, hidden_size, rng)
    bwd = LstmParams.xavier(input_size, hidden_size, rng)
    W_fy = xavier_init(hidden_size, num_classes, rng)
    W_by = xavier_init(hidden_size, num_classes, rng)
    return BlstmModel(fwd, bwd, W_fy, W_by, np.zeros(num_classes))


def blstm_forward(model, x):
    """Per-frame logits ``(T, num_classes)`` and the tapes for training."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_size:
        raise RejectedInputError(
            f"expected (T, {model.input_size}) features, got shape {x.shape}"
        )
    h_f, tape_f = lstm_forward(model.fwd, x)
    h_b_rev, tape_b = lstm_forward(model.bwd, x[::-1])
    h_b = h_b_rev[::-1]
    logits = h_f @ model.W_fy.T + h_b @ model.W_by.T + model.b_y
    return logits, BlstmTapes(tape_f, tape_b)


def blstm_backward(model, tapes, grad_logits):
    """Gradients of every model field, packed as a :class:`BlstmModel`."""
    grad_logits = np.asarray(grad_logits, dtype=np.float64)
    T = len(tapes)
    if grad_logits.shape != (T, model.num_classes):
        raise RejectedInputError(
            f"grad_logits shape {grad_logits.shape} does not match ({T}, {model.num_classes})"
        )
    h_f = tapes.fwd.h
    h_b = tapes.bwd.h[::-1]
    g_fwd, _ = lstm_backward(model.fwd, tapes.fwd, grad_logits @ model.W_fy)
    g_bwd, _ = lstm_backward(model.bwd, tapes.bwd, (grad_logits @ model.W_by)[::-1])
    return BlstmModel(
        g_fwd,
        g_bwd,
        grad_logits.T @ h_f,
        grad_logits.T @ h_b,
        grad_logits.sum(axis=0),
    )
