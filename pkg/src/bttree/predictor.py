"""Query routing and outcome tie resolution.

Two policies are available when a node's tally has several outcomes at the
maximal count:

``random``
    pick uniformly among the tied outcomes.
``backtrack``
    walk up the ancestor chain, re-ranking only the still-tied outcomes by
    each ancestor's own tally, until one outcome has the strictly highest
    count. A tie that survives the root is settled uniformly at random.

An ancestor's tally counts a superset of its descendants' rows, so ranking
by it is equivalent to accumulating counts down the chain: the tied
outcomes carry equal counts whenever the walk continues.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .dataset import Histogram
from .induction import Tree, ancestor_chain

__all__ = [
    "TieStrategy",
    "MissingAttributeError",
    "Step",
    "Prediction",
    "route",
    "max_candidates",
    "resolve_backtrack",
    "resolve_random",
    "resolve",
    "predict",
    "annotate_labels",
]

Query = Mapping[str, str]


class TieStrategy(str, enum.Enum):
    RANDOM = "random"
    BACKTRACK = "backtrack"

    def __str__(self) -> str:
        return self.value


class MissingAttributeError(KeyError):
    def __init__(self, attribute: str, node_id: int):
        self.attribute = attribute
        self.node_id = node_id
        super().__init__(f"query has no value for {attribute!r}, consulted at node {node_id}")

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class Step:
    """One stop of the tie-resolution walk.

    ``counts`` holds this node's counts for the outcomes still eligible on
    arrival; ``candidates`` are those among them at the maximal count.
    """

    node: int
    candidates: tuple[str, ...]
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {"node": self.node, "candidates": list(self.candidates), "counts": dict(self.counts)}


@dataclass(frozen=True)
class Prediction:
    label: str
    leaf: int
    steps: tuple[Step, ...]
    randomized: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "leaf": self.leaf,
            "randomized": self.randomized,
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def route(tree: Tree, query: Query) -> int:
    """Descend from the root along matching branches.

    Stops at a leaf, or at an internal node with no branch for the query's
    value (unseen value). Raises MissingAttributeError if the query lacks an
    attribute that a visited node splits on.
    """
    node = tree.node(tree.root)
    while not node.is_leaf:
        name = tree.attribute_names[node.split_attribute]
        if name not in query:
            raise MissingAttributeError(name, node.id)
        child = node.children.get(query[name])
        if child is None:
            break
        node = tree.node(child)
    return node.id


def max_candidates(tally: Histogram, restrict=None) -> frozenset[str]:
    """Outcomes reaching the maximal count, optionally among ``restrict`` only.

    Outcomes missing from ``tally`` count zero.
    """
    if restrict is None:
        if not tally:
            raise ValueError("max over an empty tally")
        pool = list(tally)
    else:
        pool = list(restrict)
        if not pool:
            raise ValueError("empty restriction set")
    best = max(tally.get(o, 0) for o in pool)
    if best == 0:
        raise ValueError(f"none of {sorted(pool)} occurs in tally {tally.as_dict()}")
    return frozenset(o for o in pool if tally.get(o, 0) == best)


def _pick(rng, candidates) -> str:
    ordered = sorted(candidates)
    if rng is None:
        rng = np.random.default_rng()
    return ordered[int(rng.integers(len(ordered)))]


def _first_step(tree: Tree, node_id: int) -> Step:
    tally = tree.node(node_id).tally
    return Step(node_id, tuple(sorted(max_candidates(tally))), tally.as_dict())


def resolve_backtrack(tree: Tree, leaf: int, rng=None) -> Prediction:
    """Break a tie at ``leaf`` by consulting successive ancestors.

    ``rng`` (a numpy Generator) is drawn from only if the tie survives the root.
    """
    first = _first_step(tree, leaf)
    steps = [first]
    candidates = first.candidates
    if len(candidates) > 1:
        for ancestor in ancestor_chain(tree, leaf):
            tally = tree.node(ancestor).tally
            counts = {o: tally.get(o, 0) for o in candidates}
            # ancestors see a superset of rows, so no candidate can vanish
            assert all(counts.values()), f"candidate missing from ancestor {ancestor}"
            candidates = tuple(sorted(max_candidates(tally, candidates)))
            steps.append(Step(ancestor, candidates, counts))
            if len(candidates) == 1:
                break
    if len(candidates) == 1:
        return Prediction(candidates[0], leaf, tuple(steps), False)
    return Prediction(_pick(rng, candidates), leaf, tuple(steps), True)


def resolve_random(tree: Tree, leaf: int, rng=None) -> Prediction:
    """Pick uniformly among the maximal outcomes of ``leaf``'s own tally."""
    first = _first_step(tree, leaf)
    if len(first.candidates) == 1:
        return Prediction(first.candidates[0], leaf, (first,), False)
    return Prediction(_pick(rng, first.candidates), leaf, (first,), True)


def resolve(tree: Tree, node_id: int, strategy: TieStrategy | str, rng=None) -> Prediction:
    strategy = TieStrategy(strategy)
    if strategy is TieStrategy.BACKTRACK:
        return resolve_backtrack(tree, node_id, rng)
    return resolve_random(tree, node_id, rng)


def predict(
    tree: Tree,
    query: Query,
    strategy: TieStrategy | str = TieStrategy.BACKTRACK,
    rng=None,
    use_resolved: bool = False,
) -> Prediction:
    """Route ``query`` and resolve the stop node under ``strategy``.

    With ``use_resolved``, a random pick is replaced by the label fixed at
    build time (see annotate_labels) when the tree was labelled under the
    same strategy, so repeated queries agree with the stored model.
    """
    strategy = TieStrategy(strategy)
    stop = route(tree, query)
    prediction = resolve(tree, stop, strategy, rng)
    if use_resolved and prediction.randomized and tree.label_strategy == strategy.value:
        stored = tree.node(stop).resolved_label
        if stored is not None and stored in prediction.steps[-1].candidates:
            prediction = Prediction(stored, stop, prediction.steps, True)
    return prediction


def annotate_labels(tree: Tree, strategy: TieStrategy | str, rng=None) -> Tree:
    """Return a copy of ``tree`` with ``resolved_label`` set on every node.

    Internal nodes are labelled too, since queries with unseen values stop
    there. Nodes are resolved in id order, so one seeded generator gives
    reproducible labels.
    """
    strategy = TieStrategy(strategy)
    labels = {nid: resolve(tree, nid, strategy, rng).label for nid in sorted(tree.nodes)}
    return tree.with_labels(labels, strategy.value)
