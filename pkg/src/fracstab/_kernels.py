"""Hot loops of the fractional Adams-Bashforth-Moulton scheme.

Two interchangeable implementations of the same recurrence live here:
``abm_loop_numba`` (compiled, needs a jitted right-hand side) and
``abm_loop_numpy`` (plain Python loop, history sums via BLAS dot products).
Both consume the reversed weight tables built by :func:`abm_weights`.
"""

import math

import numpy as np

from ._jit import njit

OVERFLOW_LIMIT = 1e12


def abm_weights(q, n_steps):
    """Reversed predictor/corrector weight tables for one order.

    Returns ``(b_rev, c_rev, a0)`` where ``b_rev[n_steps-1-k] = (k+1)^q - k^q``,
    ``c_rev[n_steps-1-k] = (k+2)^(q+1) + k^(q+1) - 2 (k+1)^(q+1)`` and
    ``a0[n]`` is the corrector weight of the initial value at step ``n -> n+1``.
    """
    k = np.arange(n_steps, dtype=np.float64)
    b = (k + 1.0) ** q - k**q
    q1 = q + 1.0
    c = (k + 2.0) ** q1 + k**q1 - 2.0 * (k + 1.0) ** q1
    a0 = k**q1 - (k - q) * (k + 1.0) ** q
    return b[::-1].copy(), c[::-1].copy(), a0


def build_tables(orders, step, n_steps):
    dim = len(orders)
    b_rev = np.empty((dim, n_steps))
    c_rev = np.empty((dim, n_steps))
    a0 = np.empty((dim, n_steps))
    pred_scale = np.empty(dim)
    corr_scale = np.empty(dim)
    cache = {}
    for i, q in enumerate(orders):
        q = float(q)
        if q not in cache:
            cache[q] = abm_weights(q, n_steps)
        b_rev[i], c_rev[i], a0[i] = cache[q]
        pred_scale[i] = step**q / math.gamma(q + 1.0)
        corr_scale[i] = step**q / math.gamma(q + 2.0)
    return b_rev, c_rev, a0, pred_scale, corr_scale


@njit(cache=True)
def abm_loop_numba(rhs, params, x0, step, n_steps, b_rev, c_rev, a0, pred_scale, corr_scale):
    dim = x0.shape[0]
    states = np.empty((n_steps + 1, dim))
    hist = np.empty((dim, n_steps + 1))
    states[0] = x0
    f0 = rhs(0.0, x0, params)
    for i in range(dim):
        hist[i, 0] = f0[i]
    pred = np.empty(dim)
    last = n_steps
    for n in range(n_steps):
        off_b = n_steps - 1 - n
        for i in range(dim):
            acc = np.dot(b_rev[i, off_b:], hist[i, : n + 1])
            pred[i] = x0[i] + pred_scale[i] * acc
        t_next = (n + 1) * step
        fp = rhs(t_next, pred, params)
        off_c = n_steps - n
        bad = False
        for i in range(dim):
            acc = a0[i, n] * hist[i, 0]
            if n > 0:
                acc += np.dot(c_rev[i, off_c:], hist[i, 1 : n + 1])
            v = x0[i] + corr_scale[i] * (fp[i] + acc)
            states[n + 1, i] = v
            if not (abs(v) <= OVERFLOW_LIMIT):
                bad = True
        if bad:
            last = n
            break
        fn = rhs(t_next, states[n + 1], params)
        for i in range(dim):
            hist[i, n + 1] = fn[i]
    return states, last


def abm_loop_numpy(rhs, x0, step, n_steps, b_rev, c_rev, a0, pred_scale, corr_scale):
    dim = x0.shape[0]
    states = np.empty((n_steps + 1, dim))
    hist = np.empty((dim, n_steps + 1))
    states[0] = x0
    hist[:, 0] = rhs(0.0, x0.copy())
    pred = np.empty(dim)
    corr = np.empty(dim)
    for n in range(n_steps):
        off_b = n_steps - 1 - n
        off_c = n_steps - n
        for i in range(dim):
            pred[i] = np.dot(b_rev[i, off_b:], hist[i, : n + 1])
        pred = x0 + pred_scale * pred
        t_next = (n + 1) * step
        fp = np.asarray(rhs(t_next, pred.copy()), dtype=np.float64)
        for i in range(dim):
            corr[i] = a0[i, n] * hist[i, 0] + np.dot(c_rev[i, off_c:], hist[i, 1 : n + 1])
        x_new = x0 + corr_scale * (fp + corr)
        states[n + 1] = x_new
        if not np.all(np.abs(x_new) <= OVERFLOW_LIMIT):
            return states, n
        hist[:, n + 1] = rhs(t_next, x_new.copy())
    return states, n_steps
