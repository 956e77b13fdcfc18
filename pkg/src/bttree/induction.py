"""ID3 induction over categorical attributes, keeping per-node tallies and parent links.

Node ids are assigned breadth-first starting at 1, children visited in
sorted attribute-value order, so a tree with a root and two levels of
binary splits is numbered N1 (root), N2..N3, N4..N7.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .dataset import Dataset, Histogram

__all__ = [
    "ROOT_ID",
    "GAIN_TIE_TOLERANCE",
    "TreeNode",
    "Tree",
    "UnknownNodeError",
    "ModelFormatError",
    "entropy",
    "information_gain",
    "build_tree",
    "ancestor_chain",
    "path_constraints",
    "tree_to_json",
    "tree_from_json",
]

ROOT_ID = 1

# Gains within this distance of the best count as tied; the lowest attribute
# index wins. Absorbs summation-order noise between equivalent partitions.
GAIN_TIE_TOLERANCE = 1e-12

MODEL_FORMAT = "bttree.tree"
MODEL_VERSION = 1


class UnknownNodeError(KeyError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"no node with id {node_id!r}")


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TreeNode:
    id: int
    parent: int | None
    indices: tuple[int, ...]
    tally: Histogram
    split_attribute: int | None = None
    children: dict[str, int] = field(default_factory=dict)
    resolved_label: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.split_attribute is None


@dataclass(frozen=True)
class Tree:
    """An induced tree. ``nodes`` maps id to node and must not be mutated."""

    root: int
    nodes: dict[int, TreeNode]
    attribute_names: tuple[str, ...]
    outcome_name: str
    outcome_domain: tuple[str, ...]
    label_strategy: str | None = None

    def node(self, node_id: int) -> TreeNode:
        try:
            return self.nodes[node_id]
        except (KeyError, TypeError):
            raise UnknownNodeError(node_id) from None

    def leaves(self) -> list[int]:
        return [nid for nid, n in sorted(self.nodes.items()) if n.is_leaf]

    def __len__(self) -> int:
        return len(self.nodes)

    def with_labels(self, labels: dict[int, str], strategy: str | None) -> "Tree":
        nodes = {
            nid: replace(n, resolved_label=labels.get(nid, n.resolved_label))
            for nid, n in self.nodes.items()
        }
        return replace(self, nodes=nodes, label_strategy=strategy)


def entropy(tally: Histogram) -> float:
    """Shannon entropy in bits of an outcome tally."""
    if not tally or tally.total <= 0:
        raise ValueError("entropy of an empty tally")
    return kernels.entropy_from_counts(np.fromiter(tally.values(), dtype=np.int64))


def information_gain(node_tally: Histogram, partition: Sequence[Histogram]) -> float:
    """Entropy of ``node_tally`` minus the size-weighted entropy of its parts."""
    merged = Histogram()
    for part in partition:
        merged = merged + part
    if merged != node_tally:
        raise ValueError(
            f"partition tallies sum to {merged.as_dict()}, node has {node_tally.as_dict()}"
        )
    total = node_tally.total
    weighted = 0.0
    for part in partition:
        if part.total:
            weighted += (part.total / total) * entropy(part)
    return entropy(node_tally) - weighted


def _encode(dataset: Dataset):
    outcomes = dataset.outcomes()
    outcome_code = {o: i for i, o in enumerate(outcomes)}
    value_tables = [dataset.attribute_values(a) for a in range(dataset.num_attributes)]
    value_codes = [{v: i for i, v in enumerate(vals)} for vals in value_tables]
    X = np.array(
        [[value_codes[a][v] for a, v in enumerate(row.values)] for row in dataset.rows],
        dtype=np.int32,
    ).reshape(len(dataset), dataset.num_attributes)
    y = np.array([outcome_code[row.outcome] for row in dataset.rows], dtype=np.int32)
    n_values = np.array([len(vals) for vals in value_tables], dtype=np.int32)
    return X, y, n_values, outcomes, value_tables


def build_tree(dataset: Dataset) -> Tree:
    """Grow an unpruned ID3 tree with multiway categorical splits.

    A node becomes a leaf when its tally is pure or every attribute is
    already used on its path. Otherwise it splits on the unused attribute
    of highest information gain (lowest index among ties), with one child
    per attribute value present in its rows.
    """
    X, y, n_values, outcomes, value_tables = _encode(dataset)
    n_outcomes = len(outcomes)
    m = dataset.num_attributes

    nodes: dict[int, TreeNode] = {}
    next_id = ROOT_ID + 1
    queue = deque([(ROOT_ID, None, np.arange(len(dataset), dtype=np.int64), ())])
    while queue:
        node_id, parent, rows, used = queue.popleft()
        counts = kernels.outcome_counts(y, rows, n_outcomes)
        tally = Histogram(tuple(zip(outcomes, counts.tolist())))
        unused = np.array([a for a in range(m) if a not in used], dtype=np.int64)
        indices = tuple(rows.tolist())

        if np.count_nonzero(counts) <= 1 or unused.size == 0:
            nodes[node_id] = TreeNode(node_id, parent, indices, tally)
            continue

        gains = kernels.split_gains(X, y, rows, unused, n_values, n_outcomes)
        best_gain = gains.max()
        best = int(unused[np.flatnonzero(gains >= best_gain - GAIN_TIE_TOLERANCE)[0]])

        column = X[rows, best]
        children: dict[str, int] = {}
        for code in np.unique(column).tolist():
            child_rows = rows[column == code]
            children[value_tables[best][code]] = next_id
            queue.append((next_id, node_id, child_rows, used + (best,)))
            next_id += 1
        nodes[node_id] = TreeNode(node_id, parent, indices, tally, best, children)

    return Tree(
        root=ROOT_ID,
        nodes=dict(sorted(nodes.items())),
        attribute_names=dataset.attribute_names,
        outcome_name=dataset.outcome_name,
        outcome_domain=tuple(outcomes),
    )


def ancestor_chain(tree: Tree, node_id: int) -> list[int]:
    """Ids from the node's parent up to and including the root."""
    chain = []
    parent = tree.node(node_id).parent
    while parent is not None:
        chain.append(parent)
        parent = tree.node(parent).parent
    return chain


def path_constraints(tree: Tree, node_id: int) -> list[tuple[str, str]]:
    """Root-first ``(attribute name, value)`` pairs leading to ``node_id``."""
    path = []
    node = tree.node(node_id)
    while node.parent is not None:
        parent = tree.node(node.parent)
        value = next(v for v, cid in parent.children.items() if cid == node.id)
        path.append((tree.attribute_names[parent.split_attribute], value))
        node = parent
    path.reverse()
    return path


def node_depth(tree: Tree, node_id: int) -> int:
    return len(ancestor_chain(tree, node_id))


def _node_to_dict(tree: Tree, node: TreeNode) -> dict:
    return {
        "id": node.id,
        "parent": node.parent,
        "split_attribute": (
            None if node.split_attribute is None else tree.attribute_names[node.split_attribute]
        ),
        "children": dict(node.children),
        "tally": node.tally.as_dict(),
        "indices": sorted(node.indices),
        "resolved_label": node.resolved_label,
    }


def tree_to_dict(tree: Tree) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "root": tree.root,
        "attribute_names": list(tree.attribute_names),
        "outcome_name": tree.outcome_name,
        "outcome_domain": sorted(tree.outcome_domain),
        "label_strategy": tree.label_strategy,
        "nodes": [_node_to_dict(tree, n) for _, n in sorted(tree.nodes.items())],
    }


def tree_to_json(tree: Tree) -> str:
    return json.dumps(tree_to_dict(tree), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def tree_from_dict(doc: dict) -> Tree:
    if doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"not a tree model (format={doc.get('format')!r})")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    try:
        attribute_names = tuple(doc["attribute_names"])
        nodes = {}
        for raw in doc["nodes"]:
            split = raw["split_attribute"]
            nodes[raw["id"]] = TreeNode(
                id=raw["id"],
                parent=raw["parent"],
                indices=tuple(raw["indices"]),
                tally=Histogram.of(raw["tally"]),
                split_attribute=None if split is None else attribute_names.index(split),
                children=dict(sorted(raw["children"].items())),
                resolved_label=raw["resolved_label"],
            )
        tree = Tree(
            root=doc["root"],
            nodes=dict(sorted(nodes.items())),
            attribute_names=attribute_names,
            outcome_name=doc["outcome_name"],
            outcome_domain=tuple(sorted(doc["outcome_domain"])),
            label_strategy=doc.get("label_strategy"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model: {exc}") from exc
    _check_links(tree)
    return tree


def tree_from_json(text: str | bytes) -> Tree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model is not valid JSON: {exc}") from exc
    return tree_from_dict(doc)


def _check_links(tree: Tree) -> None:
    roots = [nid for nid, n in tree.nodes.items() if n.parent is None]
    if roots != [tree.root]:
        raise ModelFormatError(f"expected single root {tree.root}, found {roots}")
    for node in tree.nodes.values():
        for cid in node.children.values():
            if cid not in tree.nodes or tree.nodes[cid].parent != node.id:
                raise ModelFormatError(f"child {cid} of node {node.id} does not link back")
        if node.parent is not None:
            if node.parent not in tree.nodes:
                raise ModelFormatError(f"node {node.id} has missing parent {node.parent}")
            if node.id not in tree.nodes[node.parent].children.values():
                raise ModelFormatError(f"node {node.id} is not a child of {node.parent}")
    seen, stack = set(), [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise ModelFormatError(f"node {nid} is reachable twice")
        seen.add(nid)
        stack.extend(tree.nodes[nid].children.values())
    if len(seen) != len(tree.nodes):
        raise ModelFormatError("some nodes are unreachable from the root")


def iter_internal(tree: Tree) -> Iterable[TreeNode]:
    return (n for _, n in sorted(tree.nodes.items()) if not n.is_leaf)
