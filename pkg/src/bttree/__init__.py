"""Categorical ID3 decision trees with backtrack tie-breaking.

When a leaf's outcome tally is tied, the tied outcomes are re-ranked by
each ancestor's tally in turn until one of them leads; only a tie that
survives the root is settled at random.
"""

from .dataset import Dataset, Histogram, Row, builtin_table1, dump_csv, histogram, load_csv
from .evaluation import EvalReport, evaluate, generate_tie_heavy, sign_test, sweep
from .induction import (
    Tree,
    TreeNode,
    ancestor_chain,
    build_tree,
    entropy,
    information_gain,
    path_constraints,
    tree_from_json,
    tree_to_json,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .oracle import oracle_predict, oracle_trace
from .predictor import (
    Prediction,
    TieStrategy,
    annotate_labels,
    max_candidates,
    predict,
    resolve_backtrack,
    resolve_random,
    route,
)

__version__ = "0.1.0"
