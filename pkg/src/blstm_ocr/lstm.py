"""LSTM unit bank without peephole connections.

Gate equations, for input frame ``x`` and previous state ``(c, h)``::

    i = sigmoid(W_ix x + W_ih h + b_i)
    f = sigmoid(W_fx x + W_fh h + b_f)
    g = tanh(W_cx x + W_ch h + b_c)
    c' = f * c + i * g
    o = sigmoid(W_ox x + W_oh h + b_o)
    h' = o * tanh(c')

The twelve weights are stored separately; the recurrences stack them into a
``4H``-tall block (order i, f, c, o) so each time step costs one mat-vec.
"""

from dataclasses import dataclass, fields

import numpy as np

from ._kernels import lstm_backward_loop, lstm_forward_loop
from .exceptions import RejectedInputError
from .numeric import xavier_init

GATES = ("i", "f", "c", "o")
PARAM_NAMES = tuple(
    name for g in GATES for name in (f"W_{g}x", f"W_{g}h", f"b_{g}")
)


@dataclass
class LstmParams:
    W_ix: np.ndarray
    W_ih: np.ndarray
    b_i: np.ndarray
    W_fx: np.ndarray
    W_fh: np.ndarray
    b_f: np.ndarray
    W_cx: np.ndarray
    W_ch: np.ndarray
    b_c: np.ndarray
    W_ox: np.ndarray
    W_oh: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.asarray(getattr(self, f.name), dtype=np.float64))
        H, I = self.W_ix.shape
        for g in GATES:
            wx, wh, b = (getattr(self, n) for n in (f"W_{g}x", f"W_{g}h", f"b_{g}"))
            if wx.shape != (H, I) or wh.shape != (H, H) or b.shape != (H,):
                raise RejectedInputError(
                    f"gate {g}: inconsistent shapes {wx.shape}, {wh.shape}, {b.shape}"
                )

    @property
    def hidden_size(self):
        return self.W_ix.shape[0]

    @property
    def input_size(self):
        return self.W_ix.shape[1]

    def arrays(self):
        """Parameter arrays in the fixed serialization order."""
        return [getattr(self, n) for n in PARAM_NAMES]

    def stacked(self):
        Wx = np.concatenate([self.W_ix, self.W_fx, self.W_cx, self.W_ox])
        Wh = np.concatenate([self.W_ih, self.W_fh, self.W_ch, self.W_oh])
        b = np.concatenate([self.b_i, self.b_f, self.b_c, self.b_o])
        return Wx, Wh, b

    @classmethod
    def from_stacked(cls, Wx, Wh, b):
        H = Wh.shape[1]
        parts = {}
        for k, g in enumerate(GATES):
            rows = slice(k * H, (k + 1) * H)
            parts[f"W_{g}x"] = Wx[rows]
            parts[f"W_{g}h"] = Wh[rows]
            parts[f"b_{g}"] = b[rows]
        return cls(**parts)

    @classmethod
    def zeros(cls, input_size, hidden_size):
        H, I = hidden_size, input_size
        return cls.from_stacked(np.zeros((4 * H, I)), np.zeros((4 * H, H)), np.zeros(4 * H))

    @classmethod
    def xavier(cls, input_size, hidden_size, rng):
        """Each weight matrix Glorot-initialized with its own fans; biases zero."""
        parts = {}
        for g in GATES:
            parts[f"W_{g}x"] = xavier_init(input_size, hidden_size, rng)
            parts[f"W_{g}h"] = xavier_init(hidden_size, hidden_size, rng)
            parts[f"b_{g}"] = np.zeros(hidden_size)
        return cls(**parts)

    def copy(self):
        return LstmParams(*(a.copy() for a in self.arrays()))


@dataclass
class LstmState:
    c: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, hidden_size):
        return cls(np.zeros(hidden_size), np.zeros(hidden_size))


@dataclass
class LstmTape:
    """Per-frame cache of everything backpropagation needs (rows = time)."""

    x: np.ndarray
    gates: np.ndarray  # columns: i | f | g (tanh candidate) | o
    c: np.ndarray
    tanh_c: np.ndarray
    h: np.ndarray
    c0: np.ndarray
    h0: np.ndarray

    def __len__(self):
        return self.x.shape[0]

    def _gate(self, k):
        H = self.c.shape[1]
        return self.gates[:, k * H : (k + 1) * H]

    @property
    def i(self):
        return self._gate(0)

    @property
    def f(self):
        return self._gate(1)

    @property
    def g(self):
        return self._gate(2)

    @property
    def o(self):
        return self._gate(3)


def _check_inputs(params, xs):
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim == 1 and xs.size == 0:
        xs = xs.reshape(0, params.input_size)
    if xs.ndim != 2 or xs.shape[1] != params.input_size:
        raise RejectedInputError(
            f"expected frames of length {params.input_size}, got shape {xs.shape}"
        )
    return xs


def lstm_forward(params, inputs, initial=None):
    """Run the bank over a ``(T, input_size)`` sequence.

    Returns ``(h, tape)`` where ``h`` has shape ``(T, hidden_size)``.  The
    initial state defaults to zeros.
    """
    xs = _check_inputs(params, inputs)
    H = params.hidden_size
    if initial is None:
        initial = LstmState.zeros(H)
    c_prev = np.asarray(initial.c, dtype=np.float64)
    h_prev = np.asarray(initial.h, dtype=np.float64)
    if c_prev.shape != (H,) or h_prev.shape != (H,):
        raise RejectedInputError(f"initial state must have length {H}")
    T = xs.shape[0]
    Wx, Wh, b = params.stacked()
    pre = xs @ Wx.T + b
    gates = np.empty((T, 4 * H))
    c = np.empty((T, H))
    tanh_c = np.empty((T, H))
    h = np.empty((T, H))
    c0, h0 = c_prev.copy(), h_prev.copy()
    lstm_forward_loop(pre, np.ascontiguousarray(Wh.T), c0, h0, gates, c, tanh_c, h)
    tape = LstmTape(
        x=xs,
        gates=gates,
        c=c,
        tanh_c=tanh_c,
        h=h,
        c0=c0,
        h0=h0,
    )
    return h, tape


def lstm_step(params, x_t, prev):
    """One time step; returns the new :class:`LstmState` and its tape entry."""
    x_t = np.asarray(x_t, dtype=np.float64)
    if x_t.ndim != 1:
        raise RejectedInputError("x_t must be a vector")
    h, tape = lstm_forward(params, x_t[None, :], prev)
    return LstmState(tape.c[0].copy(), h[0].copy()), tape


def lstm_backward(params, tape, grad_h):
    """Backpropagation through time.

    ``grad_h[t]`` is dL/dh_t from downstream.  Returns ``(grads, grad_x)``
    where ``grads`` is an :class:`LstmParams` of partial derivatives and
    ``grad_x`` has the shape of the input sequence.
    """
    grad_h = np.ascontiguousarray(grad_h, dtype=np.float64)
    T = len(tape)
    H = params.hidden_size
    if grad_h.shape != (T, H):
        raise RejectedInputError(
            f"grad_h shape {grad_h.shape} does not match tape ({T}, {H})"
        )
    Wx, Wh, _ = params.stacked()
    dz = np.empty((T, 4 * H))
    lstm_backward_loop(tape.gates, tape.c, tape.tanh_c, tape.c0, np.ascontiguousarray(Wh), grad_h, dz)
    h_prev = np.vstack([tape.h0[None, :], tape.h[:-1]]) if T else np.zeros((0, H))
    grads = LstmParams.from_stacked(dz.T @ tape.x, dz.T @ h_prev, dz.sum(axis=0))
    return grads, dz @ Wx
