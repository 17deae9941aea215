"""Pure numpy split-search kernels, used when the compiled extension is absent.

Mirrors ``_splitter.pyx`` operation for operation.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def _scan_rows(Xt, r, order, rows, start, end, mean, q_total, s_total, penalties,
               min_leaf, out):
    m = end - start
    seg = order[rows, start:end]
    rc = r[seg[:, :-1]] - mean
    sl = np.cumsum(rc, axis=1)
    nl = np.arange(1, m, dtype=np.float64)
    nr = m - nl
    sr = s_total - sl
    pen = penalties[rows][:, None]
    score = 0.5 * ((q_total - sl * sl / nl) - sr * sr / nr) + pen
    vals = np.take_along_axis(Xt[rows], seg, axis=1)
    valid = (vals[:, :-1] < vals[:, 1:]) & (pen < np.inf)
    valid &= (nl >= min_leaf) & (nr >= min_leaf)
    out[rows, : m - 1] = np.where(valid, score, np.inf)


def _chunks(d, n_threads):
    n_threads = max(1, min(int(n_threads), d))
    return [c for c in np.array_split(np.arange(d), n_threads) if c.size]


def split_scores(Xt, r, order, start, end, mean, q_total, s_total, penalties, min_leaf,
                 out, n_threads=1):
    """Fill ``out[f, k]`` with the score of splitting after sorted position ``k``."""
    d = Xt.shape[0]
    if end - start < 2:
        return
    args = (Xt, r, order)
    rest = (start, end, mean, q_total, s_total, penalties, min_leaf, out)
    if n_threads <= 1 or d == 1:
        _scan_rows(*args, np.arange(d), *rest)
        return
    with ThreadPoolExecutor(n_threads) as pool:
        list(pool.map(lambda rows: _scan_rows(*args, rows, *rest), _chunks(d, n_threads)))


def partition(order, start, end, go_left, n_threads=1):
    """Stable in-place partition of every feature's segment: left rows first."""
    seg = order[:, start:end]
    right = go_left[seg] == 0
    perm = np.argsort(right, axis=1, kind="stable")
    order[:, start:end] = np.take_along_axis(seg, perm, axis=1)
