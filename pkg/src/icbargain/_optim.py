"""Small numerical building blocks shared by the solvers."""

import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(fun, a, b, tol=1e-12, max_iter=400):
    """Maximize a unimodal scalar function on ``[a, b]`` by golden-section search."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def project_columns_to_simplex(v):
    """Euclidean projection of every column of ``v`` onto the probability simplex.

    ``v`` has shape (N, K); each of the K columns is projected independently
    with the sort-based O(N log N) method.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    u = -np.sort(-v, axis=0)
    css = np.cumsum(u, axis=0) - 1.0
    idx = np.arange(1, n + 1)[:, None]
    cond = u - css / idx > 0
    # cond is true on a prefix of each column; rho = last true index
    rho = n - 1 - np.argmax(cond[::-1], axis=0)
    theta = css[rho, np.arange(v.shape[1])] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def neumaier_cumsum(x):
    """Cumulative sum with Neumaier compensation."""
    out = np.empty(len(x))
    s = 0.0
    c = 0.0
    for i, v in enumerate(np.asarray(x, dtype=float)):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out
