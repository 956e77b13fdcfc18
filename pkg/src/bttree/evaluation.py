"""Accuracy estimation and paired comparison of tie strategies.

Every strategy is scored on the same folds and the same trees, so paired
differences come from tie resolution alone. Random draws are taken from a
stream keyed by ``(seed, fold, row, strategy)``: adding or removing a
strategy never shifts the draws of another.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .induction import Tree, build_tree
from .predictor import TieStrategy, max_candidates, resolve, route

__all__ = [
    "StrategyStats",
    "PairedStats",
    "EvalReport",
    "SweepSummary",
    "make_folds",
    "evaluate",
    "sweep",
    "sign_test",
    "generate_tie_heavy",
    "leaf_tie_rate",
]

# fixed stream ids keep draws independent of which strategies are requested
_STRATEGY_STREAM = {TieStrategy.RANDOM: 0, TieStrategy.BACKTRACK: 1}
_FOLD_STREAM = 1_000_003

METHODS = ("loo", "kfold")


@dataclass
class StrategyStats:
    correct: int = 0
    total: int = 0
    ties: int = 0
    randomized: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def tie_rate(self) -> float:
        return self.ties / self.total if self.total else 0.0

    @property
    def randomized_rate(self) -> float:
        return self.randomized / self.total if self.total else 0.0

    def merge(self, other: "StrategyStats") -> None:
        self.correct += other.correct
        self.total += other.total
        self.ties += other.ties
        self.randomized += other.randomized

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "correct": self.correct,
            "total": self.total,
            "tie_rate": self.tie_rate,
            "randomized_rate": self.randomized_rate,
        }


@dataclass
class PairedStats:
    backtrack_wins: int = 0
    random_wins: int = 0
    both_correct: int = 0
    both_wrong: int = 0

    @property
    def total(self) -> int:
        return self.backtrack_wins + self.random_wins + self.both_correct + self.both_wrong

    @property
    def sign_test_p(self) -> float:
        if self.backtrack_wins + self.random_wins == 0:
            return 1.0
        return sign_test(self.backtrack_wins, self.random_wins)

    def merge(self, other: "PairedStats") -> None:
        self.backtrack_wins += other.backtrack_wins
        self.random_wins += other.random_wins
        self.both_correct += other.both_correct
        self.both_wrong += other.both_wrong

    def to_dict(self) -> dict:
        return {
            "backtrack_wins": self.backtrack_wins,
            "random_wins": self.random_wins,
            "both_correct": self.both_correct,
            "both_wrong": self.both_wrong,
            "sign_test_p": self.sign_test_p,
        }


@dataclass
class EvalReport:
    method: str
    folds: int
    seed: int
    per_strategy: dict[str, StrategyStats]
    paired: PairedStats | None = None
    fold_sizes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        doc = {
            "method": self.method,
            "folds": self.folds,
            "seed": self.seed,
            "fold_sizes": list(self.fold_sizes),
            "per_strategy": {k: v.to_dict() for k, v in sorted(self.per_strategy.items())},
        }
        if self.paired is not None:
            doc["paired"] = self.paired.to_dict()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        header = ("strategy", "accuracy", "correct", "total", "tie_rate", "randomized_rate")
        body = [
            (
                name,
                f"{s.accuracy:.6f}",
                str(s.correct),
                str(s.total),
                f"{s.tie_rate:.6f}",
                f"{s.randomized_rate:.6f}",
            )
            for name, s in sorted(self.per_strategy.items())
        ]
        lines = [f"method={self.method} folds={self.folds} seed={self.seed}"]
        lines += _table(header, body, label_column=True)
        if self.paired is not None:
            p = self.paired
            lines.append("")
            lines += _table(
                ("backtrack_wins", "random_wins", "both_correct", "both_wrong", "sign_test_p"),
                [(str(p.backtrack_wins), str(p.random_wins), str(p.both_correct),
                  str(p.both_wrong), f"{p.sign_test_p:.6g}")],
            )
        return "\n".join(lines)


def _table(header, body, label_column=False) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    fmt = lambda r: "  ".join(  # noqa: E731
        c.ljust(w) if i == 0 and label_column else c.rjust(w)
        for i, (c, w) in enumerate(zip(r, widths))
    )
    return [fmt(header), fmt(tuple("-" * w for w in widths)), *map(fmt, body)]


def sign_test(wins_a: int, wins_b: int) -> float:
    """Two-sided exact binomial sign test on discordant pairs (p = 1/2)."""
    if wins_a < 0 or wins_b < 0:
        raise ValueError("win counts must be non-negative")
    n = wins_a + wins_b
    if n == 0:
        raise ValueError("sign test needs at least one discordant pair")
    k = min(wins_a, wins_b)
    tail = sum(math.comb(n, i) for i in range(k + 1))
    # exact integer comparison before the only rounding step
    if 2 * tail >= 2**n:
        return 1.0
    return 2 * tail / 2**n


class _LazyRng:
    """Seed-keyed generator, constructed only if a draw is requested."""

    __slots__ = ("_key", "_gen")

    def __init__(self, *key: int):
        self._key = key
        self._gen = None

    def integers(self, *args, **kwargs):
        if self._gen is None:
            seed, *spawn = self._key
            self._gen = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn))
        return self._gen.integers(*args, **kwargs)


def make_folds(dataset: Dataset, method: str = "loo", k: int | None = None,
               seed: int = 0) -> list[list[int]]:
    """Held-out row indices per fold.

    ``kfold`` stratifies by outcome when every outcome has at least ``k``
    rows, and otherwise deals a seeded permutation round-robin.
    """
    n = len(dataset)
    if n < 2:
        raise ValueError("evaluation needs at least 2 rows")
    if method == "loo":
        return [[i] for i in range(n)]
    if method != "kfold":
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if k is None or not 2 <= k <= n:
        raise ValueError(f"k-fold needs 2 <= k <= {n}, got k={k}")

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_FOLD_STREAM,)))
    by_outcome: dict[str, list[int]] = {}
    for row in dataset.rows:
        by_outcome.setdefault(row.outcome, []).append(row.index)
    if min(len(v) for v in by_outcome.values()) >= k:
        order = []
        for outcome in sorted(by_outcome):
            members = by_outcome[outcome]
            order += [members[j] for j in rng.permutation(len(members))]
    else:
        order = rng.permutation(n).tolist()
    folds: list[list[int]] = [[] for _ in range(k)]
    for position, index in enumerate(order):
        folds[position % k].append(int(index))
    return [sorted(f) for f in folds]


def _score_fold(dataset: Dataset, test: Sequence[int], fold: int, seed: int,
                strategies: Sequence[TieStrategy]):
    held = set(test)
    train_idx = [i for i in range(len(dataset)) if i not in held]
    tree = build_tree(dataset.subset(train_idx))
    stats = {s.value: StrategyStats() for s in strategies}
    paired = PairedStats()
    names = dataset.attribute_names
    for i in test:
        row = dataset.rows[i]
        stop = route(tree, dict(zip(names, row.values)))
        tied = len(max_candidates(tree.node(stop).tally)) > 1
        hits = {}
        for strategy in strategies:
            rng = _LazyRng(seed, fold, i, _STRATEGY_STREAM[strategy])
            prediction = resolve(tree, stop, strategy, rng)
            hit = prediction.label == row.outcome
            hits[strategy] = hit
            s = stats[strategy.value]
            s.total += 1
            s.correct += hit
            s.ties += tied
            s.randomized += prediction.randomized
        if TieStrategy.BACKTRACK in hits and TieStrategy.RANDOM in hits:
            b, r = hits[TieStrategy.BACKTRACK], hits[TieStrategy.RANDOM]
            if b and r:
                paired.both_correct += 1
            elif b:
                paired.backtrack_wins += 1
            elif r:
                paired.random_wins += 1
            else:
                paired.both_wrong += 1
    return stats, paired


def evaluate(
    dataset: Dataset,
    method: str = "loo",
    k: int | None = None,
    strategies: Iterable[TieStrategy | str] = (TieStrategy.BACKTRACK, TieStrategy.RANDOM),
    seed: int = 0,
) -> EvalReport:
    """Cross-validate every requested tie strategy on shared folds and trees.

    The paired block is filled only when both strategies are requested.
    """
    strategies = list(dict.fromkeys(TieStrategy(s) for s in strategies))
    if not strategies:
        raise ValueError("no strategies to evaluate")
    folds = make_folds(dataset, method, k, seed)
    report = EvalReport(
        method=method,
        folds=len(folds),
        seed=seed,
        per_strategy={s.value: StrategyStats() for s in strategies},
        paired=PairedStats() if len(strategies) == 2 else None,
        fold_sizes=[len(f) for f in folds],
    )
    for fold, test in enumerate(folds):
        stats, paired = _score_fold(dataset, test, fold, seed, strategies)
        for name, s in stats.items():
            report.per_strategy[name].merge(s)
        if report.paired is not None:
            report.paired.merge(paired)
    return report


@dataclass
class SweepSummary:
    reports: list[EvalReport]

    def mean_accuracy(self, strategy: TieStrategy | str) -> float:
        name = TieStrategy(strategy).value
        return float(np.mean([r.per_strategy[name].accuracy for r in self.reports]))

    def pooled(self, strategy: TieStrategy | str) -> StrategyStats:
        name = TieStrategy(strategy).value
        total = StrategyStats()
        for r in self.reports:
            total.merge(r.per_strategy[name])
        return total

    def pooled_paired(self) -> PairedStats:
        total = PairedStats()
        for r in self.reports:
            if r.paired is not None:
                total.merge(r.paired)
        return total

    @property
    def accuracy_delta(self) -> float:
        """Mean backtrack accuracy minus mean random accuracy."""
        return self.mean_accuracy(TieStrategy.BACKTRACK) - self.mean_accuracy(TieStrategy.RANDOM)

    def to_dict(self) -> dict:
        return {
            "seeds": [r.seed for r in self.reports],
            "mean_accuracy": {
                s.value: self.mean_accuracy(s) for s in (TieStrategy.BACKTRACK, TieStrategy.RANDOM)
            },
            "accuracy_delta": self.accuracy_delta,
            "pooled": {
                s.value: self.pooled(s).to_dict()
                for s in (TieStrategy.BACKTRACK, TieStrategy.RANDOM)
            },
            "paired": self.pooled_paired().to_dict(),
        }


def sweep(dataset: Dataset, seeds: Iterable[int], method: str = "kfold",
          k: int | None = 5) -> SweepSummary:
    """Paired backtrack-vs-random comparison repeated over several seeds."""
    return SweepSummary([evaluate(dataset, method, k, seed=s) for s in seeds])


def generate_tie_heavy(
    num_rows: int,
    num_attributes: int,
    values_per_attribute: int,
    num_outcomes: int,
    tie_bias: float,
    seed: int,
) -> Dataset:
    """Seeded synthetic data in which conflicting duplicates create leaf ties.

    Each attribute value carries a random score per outcome; a profile's
    true outcome is the argmax of the summed scores, so nearby profiles
    tend to share outcomes. With probability ``tie_bias`` a profile is
    emitted twice, once with its true outcome and once with a different
    one. At ``tie_bias=0`` the outcome is a function of the profile.
    """
    for name, value in (
        ("num_rows", num_rows),
        ("num_attributes", num_attributes),
        ("values_per_attribute", values_per_attribute),
        ("num_outcomes", num_outcomes),
    ):
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if not 0.0 <= tie_bias <= 1.0:
        raise ValueError(f"tie_bias must be in [0, 1], got {tie_bias!r}")

    rng = np.random.default_rng(seed)
    scores = rng.random((num_attributes, values_per_attribute, num_outcomes))
    columns = np.arange(num_attributes)
    records = []
    while len(records) < num_rows:
        profile = rng.integers(values_per_attribute, size=num_attributes)
        true = int(np.argmax(scores[columns, profile].sum(axis=0)))
        values = tuple(f"v{v}" for v in profile.tolist())
        records.append((values, f"c{true}"))
        if num_outcomes > 1 and len(records) < num_rows and rng.random() < tie_bias:
            other = int(rng.integers(num_outcomes - 1))
            other += other >= true
            records.append((values, f"c{other}"))
    return Dataset.from_records(
        (f"x{a}" for a in range(num_attributes)), "y", records
    )


def leaf_tie_rate(tree: Tree) -> float:
    """Fraction of leaves whose tally has two or more maximal outcomes."""
    leaves = tree.leaves()
    tied = sum(len(max_candidates(tree.node(n).tally)) > 1 for n in leaves)
    return tied / len(leaves)
