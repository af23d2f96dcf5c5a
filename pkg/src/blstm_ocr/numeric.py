"""Dense linear algebra and activation primitives.

Matrices and vectors are plain ``float64`` numpy arrays.  Every function
here is pure: inputs are never modified.
"""

import numpy as np

from .exceptions import RejectedInputError


def as_vector(x, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise RejectedInputError(f"{name} must be 1-D, got shape {x.shape}")
    return x


def as_matrix(W, name="W"):
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise RejectedInputError(f"{name} must be 2-D, got shape {W.shape}")
    return W


def affine(W, x, b):
    """Return ``W @ x + b`` after checking that the shapes line up."""
    W = as_matrix(W)
    x = as_vector(x)
    b = as_vector(b, "b")
    if W.shape[1] != x.shape[0] or W.shape[0] != b.shape[0]:
        raise RejectedInputError(
            f"dimension mismatch: W {W.shape}, x {x.shape}, b {b.shape}"
        )
    return W @ x + b


def sigmoid(x):
    # tanh form: one ufunc call, no overflow for large |x|.
    return 0.5 + 0.5 * np.tanh(0.5 * np.asarray(x, dtype=np.float64))


def activate(kind, x):
    """Elementwise ``"sigmoid"`` or ``"tanh"``."""
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "tanh":
        return np.tanh(np.asarray(x, dtype=np.float64))
    raise RejectedInputError(f"unknown activation {kind!r}")


def log_softmax(logits, axis=-1):
    logits = np.asarray(logits, dtype=np.float64)
    m = np.max(logits, axis=axis, keepdims=True)
    shifted = logits - m
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))


def softmax(logits, axis=-1):
    """Max-shifted softmax along ``axis`` (the last one by default)."""
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise RejectedInputError("logits must be finite")
    e = np.exp(logits - np.max(logits, axis=axis, keepdims=True))
    return e / np.sum(e, axis=axis, keepdims=True)


def make_rng(seed):
    """Seeded PCG64 generator; the stream is fixed by numpy's published algorithm."""
    return np.random.Generator(np.random.PCG64(seed))


def glorot_limit(fan_in, fan_out):
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def xavier_init(fan_in, fan_out, seed):
    """Glorot-uniform ``fan_out x fan_in`` matrix drawn from ``U[-L, L]``.

    ``L = sqrt(6 / (fan_in + fan_out))``.  ``seed`` may be an integer or an
    already constructed :class:`numpy.random.Generator`, in which case draws
    continue from its current state.
    """
    if int(fan_in) < 1 or int(fan_out) < 1:
        raise RejectedInputError(f"fans must be >= 1, got ({fan_in}, {fan_out})")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    limit = glorot_limit(fan_in, fan_out)
    return rng.uniform(-limit, limit, size=(int(fan_out), int(fan_in)))
