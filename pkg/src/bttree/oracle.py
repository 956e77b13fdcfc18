"""Brute-force reference for backtrack tie-breaking, computed from raw rows.

A tree node is stood in for by the list of ``(attribute, value)`` tests on
its path; its tally is recounted from every training row matching a prefix
of that list. No tree, histogram, or predictor code is used here.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

__all__ = ["OracleResult", "NoMatchingRowsError", "oracle_trace", "oracle_predict"]


class NoMatchingRowsError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    label: str
    candidates: tuple[str, ...]  # still tied when the walk stopped
    randomized: bool
    prefix_lengths: tuple[int, ...]  # one per examined prefix, longest first


def _count(dataset: Dataset, tests: Sequence[tuple[int, str]]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for row in dataset.rows:
        if all(row.values[a] == v for a, v in tests):
            counts[row.outcome] = counts.get(row.outcome, 0) + 1
    return counts


def oracle_trace(dataset: Dataset, path_constraints, rng=None) -> OracleResult:
    tests = [(dataset.attribute_names.index(name), value) for name, value in path_constraints]
    counts = _count(dataset, tests)
    if not counts:
        raise NoMatchingRowsError(f"no rows match {list(path_constraints)}")
    top = max(counts.values())
    candidates = sorted(o for o, c in counts.items() if c == top)
    examined = [len(tests)]
    while len(candidates) > 1 and tests:
        tests = tests[:-1]
        counts = _count(dataset, tests)
        top = max(counts.get(o, 0) for o in candidates)
        candidates = [o for o in candidates if counts.get(o, 0) == top]
        examined.append(len(tests))
    if len(candidates) == 1:
        return OracleResult(candidates[0], tuple(candidates), False, tuple(examined))
    if rng is None:
        rng = np.random.default_rng()
    label = candidates[int(rng.integers(len(candidates)))]
    return OracleResult(label, tuple(candidates), True, tuple(examined))


def oracle_predict(dataset: Dataset, path_constraints, rng=None) -> str:
    """Label chosen by backtrack tie-breaking, recomputed from the rows."""
    return oracle_trace(dataset, path_constraints, rng).label
