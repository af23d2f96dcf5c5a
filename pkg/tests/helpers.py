"""Central finite differences and the relative-error metric used by the gradient tests."""

import numpy as np

EPS = 1e-6
REL_TOL = 1e-5
ABS_FLOOR = 1e-8


def numeric_gradient(f, arrays, eps=EPS):
    """d f / d a for every element of every array, perturbing in place."""
    grads = []
    for a in arrays:
        g = np.zeros_like(a)
        it = np.nditer(a, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = a[idx]
            a[idx] = old + eps
            fp = f()
            a[idx] = old - eps
            fm = f()
            a[idx] = old
            g[idx] = (fp - fm) / (2 * eps)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric):
    """Largest relative error, ignoring entries whose absolute gap is under the floor."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        diff = np.abs(a - n)
        scale = np.maximum(np.abs(a), np.abs(n))
        rel = np.where(diff <= ABS_FLOOR, 0.0, diff / np.where(scale == 0, 1.0, scale))
        if rel.size:
            worst = max(worst, float(rel.max()))
    return worst
