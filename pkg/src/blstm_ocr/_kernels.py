"""Compiled inner loops for the time recurrences.

Only the sequential parts live here; everything that can be expressed as a
single matrix product stays in numpy.
"""

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def _sig(v):
    return 0.5 + 0.5 * math.tanh(0.5 * v)


@njit(cache=True)
def lstm_forward_loop(pre, WhT, c0, h0, gates, c, tanh_c, h):
    """Fill gates (i|f|g|o), c, tanh(c) and h for every frame.

    ``WhT`` is the transposed recurrent block, ``(H, 4H)``.
    """
    T = pre.shape[0]
    H = h0.shape[0]
    c_prev = c0.copy()
    h_prev = h0.copy()
    z = np.empty(4 * H)
    for t in range(T):
        for r in range(4 * H):
            z[r] = pre[t, r]
        for k in range(H):
            hk = h_prev[k]
            for r in range(4 * H):
                z[r] += WhT[k, r] * hk
        for j in range(H):
            ig = _sig(z[j])
            fg = _sig(z[H + j])
            gg = math.tanh(z[2 * H + j])
            og = _sig(z[3 * H + j])
            cj = fg * c_prev[j] + ig * gg
            tc = math.tanh(cj)
            gates[t, j] = ig
            gates[t, H + j] = fg
            gates[t, 2 * H + j] = gg
            gates[t, 3 * H + j] = og
            c[t, j] = cj
            tanh_c[t, j] = tc
            h[t, j] = og * tc
        for j in range(H):
            c_prev[j] = c[t, j]
            h_prev[j] = h[t, j]


@njit(cache=True)
def lstm_backward_loop(gates, c, tanh_c, c0, Wh, grad_h, dz):
    """Fill dz[t] = dL/d(gate pre-activations) at every frame."""
    T = gates.shape[0]
    H = c0.shape[0]
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in range(T - 1, -1, -1):
        for j in range(H):
            ig = gates[t, j]
            fg = gates[t, H + j]
            gg = gates[t, 2 * H + j]
            og = gates[t, 3 * H + j]
            tc = tanh_c[t, j]
            cp = c[t - 1, j] if t > 0 else c0[j]
            dh = grad_h[t, j] + dh_next[j]
            dc = dc_next[j] + dh * og * (1.0 - tc * tc)
            dz[t, j] = dc * gg * ig * (1.0 - ig)
            dz[t, H + j] = dc * cp * fg * (1.0 - fg)
            dz[t, 2 * H + j] = dc * ig * (1.0 - gg * gg)
            dz[t, 3 * H + j] = dh * tc * og * (1.0 - og)
            dc_next[j] = dc * fg
        for k in range(H):
            dh_next[k] = 0.0
        for r in range(4 * H):
            d = dz[t, r]
            for k in range(H):
                dh_next[k] += d * Wh[r, k]


@njit(cache=True)
def _lae(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True)
def ctc_alpha_beta(lp, skip, alpha, beta):
    """Forward and backward log-variables over the blank-extended target.

    ``lp[t, s]`` is the log-probability of extended label ``s`` at frame
    ``t``; ``beta`` excludes the emission at its own frame.
    """
    T, S = lp.shape
    for t in range(T):
        for s in range(S):
            alpha[t, s] = NEG_INF
            beta[t, s] = NEG_INF
    alpha[0, 0] = lp[0, 0]
    if S > 1:
        alpha[0, 1] = lp[0, 1]
    for t in range(1, T):
        for s in range(S):
            a = alpha[t - 1, s]
            if s >= 1:
                a = _lae(a, alpha[t - 1, s - 1])
            if s >= 2 and skip[s]:
                a = _lae(a, alpha[t - 1, s - 2])
            if a != NEG_INF:
                alpha[t, s] = a + lp[t, s]
    beta[T - 1, S - 1] = 0.0
    if S > 1:
        beta[T - 1, S - 2] = 0.0
    for t in range(T - 2, -1, -1):
        for s in range(S):
            b = beta[t + 1, s] + lp[t + 1, s]
            if s + 1 < S:
                b = _lae(b, beta[t + 1, s + 1] + lp[t + 1, s + 1])
            if s + 2 < S and skip[s + 2]:
                b = _lae(b, beta[t + 1, s + 2] + lp[t + 1, s + 2])
            beta[t, s] = b
