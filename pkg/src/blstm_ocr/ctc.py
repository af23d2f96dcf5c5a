"""Connectionist temporal classification: loss, gradient and decoders.

Logits are ``(T, C)`` arrays of unnormalized per-frame scores; the softmax
is applied here.  All recursions run in log space.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ctc_alpha_beta
from .exceptions import InfeasibleTargetError, RejectedInputError
from .numeric import log_softmax

NEG_INF = -np.inf


@dataclass
class CtcResult:
    loss: float
    grad_logits: np.ndarray


def collapse(path, blank):
    """Merge adjacent repeats, then drop blanks."""
    out = []
    prev = None
    for k in path:
        k = int(k)
        if k != prev and k != blank:
            out.append(k)
        prev = k
    return out


def min_frames(target):
    """Shortest path length that can emit ``target``."""
    target = list(target)
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats


def _check_logits(logits):
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2 or logits.shape[1] < 1:
        raise RejectedInputError(f"logits must be (T, C), got shape {logits.shape}")
    if not np.all(np.isfinite(logits)):
        raise RejectedInputError("logits must be finite")
    return logits


def _check_target(target, blank, num_classes):
    target = [int(k) for k in target]
    for k in target:
        if k == blank or not 0 <= k < num_classes:
            raise RejectedInputError(f"invalid target label {k}")
    return target


def _extend(target, blank):
    ext = np.full(2 * len(target) + 1, blank, dtype=np.intp)
    ext[1::2] = target
    # skip[s]: transition s-2 -> s allowed (non-blank, differs from label two back)
    skip = np.zeros(len(ext), dtype=bool)
    if len(ext) > 2:
        skip[2:] = (ext[2:] != blank) & (ext[2:] != ext[:-2])
    return ext, skip


def ctc_loss(logits, target, blank):
    """Negative log probability of ``target`` and its gradient w.r.t. logits."""
    logits = _check_logits(logits)
    T, C = logits.shape
    if not 0 <= blank < C:
        raise RejectedInputError(f"blank index {blank} out of range")
    target = _check_target(target, blank, C)
    need = min_frames(target)
    if T < need or T == 0:
        raise InfeasibleTargetError(
            f"target of length {len(target)} needs at least {max(need, 1)} frames, got {T}"
        )
    logp = log_softmax(logits)
    ext, skip = _extend(target, blank)
    S = len(ext)
    lp = logp[:, ext]  # (T, S) emission log-probs along the extended target

    alpha = np.empty((T, S))
    beta = np.empty((T, S))
    ctc_alpha_beta(np.ascontiguousarray(lp), skip, alpha, beta)

    log_p = alpha[T - 1, S - 1] if S == 1 else np.logaddexp(alpha[T - 1, S - 1], alpha[T - 1, S - 2])
    occupancy = np.exp(alpha + beta - log_p)  # (T, S) posterior of being in state s
    posterior = np.zeros((T, C))
    for s in range(S):
        posterior[:, ext[s]] += occupancy[:, s]
    grad = np.exp(logp) - posterior
    return CtcResult(float(-log_p), grad)


def ctc_brute_force(probs, target, blank, max_frames=8, max_classes=4):
    """Exact P(target) by enumerating every frame path.  Tiny inputs only."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2:
        raise RejectedInputError("probs must be (T, C)")
    T, C = probs.shape
    if T > max_frames or C > max_classes:
        raise RejectedInputError(
            f"brute force limited to T <= {max_frames}, C <= {max_classes}; got ({T}, {C})"
        )
    target = list(target)
    total = 0.0
    for path in itertools.product(range(C), repeat=T):
        if collapse(path, blank) == target:
            p = 1.0
            for t, k in enumerate(path):
                p *= probs[t, k]
            total += p
    return total


def sequence_distribution(probs, blank, max_frames=8, max_classes=4):
    """Map every reachable label sequence (as a tuple) to its probability."""
    probs = np.asarray(probs, dtype=np.float64)
    T, C = probs.shape
    if T > max_frames or C > max_classes:
        raise RejectedInputError("instance too large to enumerate")
    dist = {}
    for path in itertools.product(range(C), repeat=T):
        p = 1.0
        for t, k in enumerate(path):
            p *= probs[t, k]
        key = tuple(collapse(path, blank))
        dist[key] = dist.get(key, 0.0) + p
    return dist


def greedy_decode(logits, blank):
    """Best path: per-frame argmax (lowest index wins ties), then collapse."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape[0] == 0:
        return []
    return collapse(np.argmax(logits, axis=1), blank)


def _logadd(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def _rank_key(item):
    prefix, (pb, pnb) = item
    return (-_logadd(pb, pnb), len(prefix), prefix)


def beam_search(logits, blank, beam_width=10):
    """Prefix beam search.

    Returns the surviving hypotheses as ``(labels, log_prob)`` pairs, best
    first.  Each prefix keeps separate log-mass for paths ending in blank and
    in its last label; ranking is by total probability, then shorter prefix,
    then lexicographic label order.
    """
    if beam_width is None:
        beam_width = math.inf
    elif int(beam_width) < 1:
        raise RejectedInputError("beam_width must be >= 1")
    logp = log_softmax(_check_logits(logits)) if np.size(logits) else np.zeros((0, 1))
    T, C = logp.shape
    beams = {(): (0.0, NEG_INF)}
    for t in range(T):
        row = logp[t].tolist()
        lb = row[blank]
        nxt = {}

        def add(prefix, b, nb):
            ob, onb = nxt.get(prefix, (NEG_INF, NEG_INF))
            nxt[prefix] = (_logadd(ob, b), _logadd(onb, nb))

        for prefix, (pb, pnb) in beams.items():
            total = _logadd(pb, pnb)
            add(prefix, total + lb, NEG_INF)
            last = prefix[-1] if prefix else None
            if last is not None:
                add(prefix, NEG_INF, pnb + row[last])
            for k in range(C):
                if k == blank:
                    continue
                ext = prefix + (k,)
                if k == last:
                    add(ext, NEG_INF, pb + row[k])
                else:
                    add(ext, NEG_INF, total + row[k])
        ranked = sorted(nxt.items(), key=_rank_key)
        if len(ranked) > beam_width:
            ranked = ranked[: int(beam_width)]
        beams = dict(ranked)
    ranked = sorted(beams.items(), key=_rank_key)
    return [(list(prefix), _logadd(pb, pnb)) for prefix, (pb, pnb) in ranked]


def beam_decode(logits, blank, beam_width=10):
    """Most probable label sequence under prefix beam search."""
    return beam_search(logits, blank, beam_width)[0][0]
