"""Pure-Python split-statistics kernels (fallback for ``_ckernels``).

Loops mirror the compiled version exactly so both backends agree to the bit.
"""

from math import log2

import numpy as np


def _entropy(counts, total):
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * log2(p)
    return h


def outcome_counts(y, rows, n_outcomes):
    out = [0] * n_outcomes
    ys = y.tolist()
    for r in rows.tolist():
        out[ys[r]] += 1
    return np.array(out, dtype=np.int64)


def entropy_from_counts(counts):
    counts = [int(c) for c in counts]
    total = sum(counts)
    if total <= 0:
        raise ValueError("entropy of an empty tally")
    return _entropy(counts, total)


def split_gains(X, y, rows, attrs, n_values, n_outcomes):
    rows = rows.tolist()
    n = len(rows)
    if n == 0:
        raise ValueError("split gains over an empty row set")
    y_all = y.tolist()
    ys = [y_all[r] for r in rows]
    parent = [0] * n_outcomes
    for o in ys:
        parent[o] += 1
    parent_h = _entropy(parent, n)
    gains = np.zeros(len(attrs), dtype=np.float64)
    for a, attr in enumerate(attrs.tolist()):
        nv = int(n_values[attr])
        table = [[0] * n_outcomes for _ in range(nv)]
        sizes = [0] * nv
        column = X[:, attr].tolist()
        for r, o in zip(rows, ys):
            v = column[r]
            table[v][o] += 1
            sizes[v] += 1
        weighted = 0.0
        for v in range(nv):
            if sizes[v] > 0:
                weighted += (sizes[v] / n) * _entropy(table[v], sizes[v])
        gains[a] = parent_h - weighted
    return gains
