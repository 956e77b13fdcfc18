"""Test-only generators and independent reference computations."""

import math

import numpy as np

from bttree.dataset import Dataset
from bttree.induction import ancestor_chain, path_constraints


def random_dataset(rng, max_attributes=6, max_values=4, max_rows=200, max_outcomes=6):
    """Uniformly sized random categorical dataset."""
    m = int(rng.integers(1, max_attributes + 1))
    n = int(rng.integers(1, max_rows + 1))
    k = int(rng.integers(1, max_outcomes + 1))
    values = rng.integers(1, max_values + 1, size=m)
    X = np.stack([rng.integers(v, size=n) for v in values], axis=1)
    y = rng.integers(k, size=n)
    records = [
        (tuple(f"v{v}" for v in X[i].tolist()), f"o{int(y[i])}") for i in range(n)
    ]
    return Dataset.from_records((f"A{j}" for j in range(m)), "out", records)


def direct_entropy(counts):
    """Shannon entropy via log2(N) - sum(c log2 c)/N, natural logs."""
    counts = [c for c in counts if c]
    n = sum(counts)
    return (math.log(n) - sum(c * math.log(c) for c in counts) / n) / math.log(2)


def accumulated_backtrack(tree, leaf):
    """Backtrack with explicit accumulation: each step adds the ancestor's
    counts for the tied outcomes onto a running total started at the leaf.

    Returns the final candidate tuple (length 1 when a winner emerged).
    """
    tally = tree.node(leaf).tally
    top = max(tally.values())
    candidates = sorted(o for o, c in tally.items() if c == top)
    running = {o: tally[o] for o in candidates}
    for ancestor in ancestor_chain(tree, leaf):
        if len(candidates) == 1:
            break
        a_tally = tree.node(ancestor).tally
        for o in candidates:
            running[o] += a_tally.get(o, 0)
        top = max(running[o] for o in candidates)
        candidates = [o for o in candidates if running[o] == top]
    return tuple(candidates)


def leaf_query(tree, leaf):
    return dict(path_constraints(tree, leaf))


class ExplodingRng:
    """Stands in for a generator that must never be consulted."""

    def integers(self, *args, **kwargs):
        raise AssertionError("rng consulted")
