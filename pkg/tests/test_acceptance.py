"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""

import math
import time

import numpy as np
import pytest

from bttree.dataset import Histogram, builtin_table1, dump_csv, histogram, load_csv
from bttree.evaluation import evaluate, generate_tie_heavy, sweep
from bttree.induction import (
    ancestor_chain,
    build_tree,
    entropy,
    information_gain,
    path_constraints,
    tree_from_json,
    tree_to_json,
)
from bttree.oracle import oracle_trace
from bttree.predictor import (
    annotate_labels,
    max_candidates,
    predict,
    resolve_backtrack,
    resolve_random,
)

from helpers import ExplodingRng, direct_entropy, random_dataset


@pytest.mark.acceptance("AC1 golden worked example: tree shape, N4 tally, N4 -> t1 via N2")
def test_ac1_golden_n4(record_property):
    start = time.perf_counter()
    ds = builtin_table1()
    tree = build_tree(ds)
    p = predict(tree, {"Attr A": "a0", "Attr B": "b0"}, "backtrack", ExplodingRng())
    elapsed = time.perf_counter() - start

    assert len(tree) == 7
    assert tree.attribute_names[tree.node(tree.root).split_attribute] == "Attr A"
    n4 = tree.node(4)
    assert n4.tally == {"t1": 1, "t2": 1}
    assert set(n4.indices) == {6, 7}
    assert {o: tree.node(2).tally[o] for o in ("t1", "t2")} == {"t1": 2, "t2": 1}
    assert p.label == "t1"
    assert [s.node for s in p.steps] == [4, 2]
    assert p.randomized is False
    assert elapsed < 1.0
    record_property("detail", f"7 nodes, N4 -> t1 via N2, {elapsed * 1000:.1f} ms")


@pytest.mark.acceptance("AC2 golden N6 chain (N6 -> N3 -> N1 -> t0)")
def test_ac2_golden_n6_chain(record_property):
    tree = build_tree(builtin_table1())
    p = predict(tree, {"Attr A": "a1", "Attr B": "b0"}, "backtrack", ExplodingRng())
    assert p.label == "t0"
    assert [s.node for s in p.steps] == [6, 3, 1]
    assert p.steps[1].candidates == ("t0", "t3")
    assert p.steps[1].counts == {"t0": 1, "t3": 1}
    assert p.steps[2].counts == {"t0": 2, "t3": 1}
    assert p.steps[2].candidates == ("t0",)
    assert not p.randomized
    record_property("detail", "N3 still tied 1:1, N1 resolves 2:1")


@pytest.mark.acceptance("AC3 oracle equivalence on 1,000 random datasets")
def test_ac3_oracle_equivalence(record_property):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    leaves = mismatches = randomized = 0
    for case in range(1000):
        ds = random_dataset(rng, max_attributes=6, max_values=4, max_rows=200, max_outcomes=6)
        tree = build_tree(ds)
        for leaf in tree.leaves():
            leaves += 1
            got = resolve_backtrack(tree, leaf, np.random.default_rng([case, leaf]))
            want = oracle_trace(ds, path_constraints(tree, leaf), np.random.default_rng([case, leaf]))
            ok = got.randomized == want.randomized and got.label == want.label
            if got.randomized and want.randomized:
                randomized += 1
                ok = ok and got.steps[-1].candidates == want.candidates
            mismatches += not ok
    elapsed = time.perf_counter() - start
    assert mismatches == 0
    assert elapsed < 60.0
    record_property(
        "detail", f"{leaves} leaves, {randomized} root-exhausted, 0 mismatches, {elapsed:.1f} s"
    )


def _check_properties(ds, rng):
    """All listed invariants on one generated dataset; returns checks performed."""
    checks = 0
    tree = build_tree(ds)

    # build determinism
    assert tree_to_json(build_tree(ds)) == tree_to_json(tree)
    checks += 1

    assert tree.node(tree.root).tally == histogram(ds, range(len(ds)))
    for node in tree.nodes.values():
        # entropy bounds
        h = entropy(node.tally)
        assert 0.0 <= h <= math.log2(len(node.tally)) + 1e-12
        checks += 1
        used = {tree.node(a).split_attribute for a in ancestor_chain(tree, node.id)}
        if not node.is_leaf:
            # count conservation
            total = Histogram()
            for cid in node.children.values():
                total = total + tree.node(cid).tally
            assert total == node.tally
            checks += 1
        # gain non-negativity for every candidate split at this node
        for attr in range(ds.num_attributes):
            if attr in used:
                continue
            groups = {}
            for i in node.indices:
                groups.setdefault(ds[i].values[attr], []).append(i)
            parts = [histogram(ds, g) for _, g in sorted(groups.items())]
            assert information_gain(node.tally, parts) >= -1e-12
            checks += 1

    for leaf in tree.leaves():
        seed = int(rng.integers(2**32))
        p = resolve_backtrack(tree, leaf, np.random.default_rng(seed))
        # monotonicity and winner membership
        for before, after in zip(p.steps, p.steps[1:]):
            assert after.candidates and set(after.candidates) <= set(before.candidates)
        assert p.label in p.steps[-1].candidates
        assert p.label in max_candidates(tree.node(leaf).tally)
        checks += 1
        # strategy agreement on unique maxima
        if len(p.steps[0].candidates) == 1:
            r = resolve_random(tree, leaf, ExplodingRng())
            assert r.label == p.label and not r.randomized and not p.randomized
            checks += 1
    return checks


@pytest.mark.acceptance("AC4 property suite >= 10,000 generated cases")
def test_ac4_property_suite(record_property):
    rng = np.random.default_rng(77)
    cases = checks = 0
    while cases < 10_000:
        ds = random_dataset(rng, max_attributes=4, max_values=3, max_rows=30, max_outcomes=4)
        checks += _check_properties(ds, rng)
        cases += 1
    assert cases >= 10_000
    record_property("detail", f"{cases} datasets, {checks} individual checks")


@pytest.mark.acceptance("AC5 entropy/gain numerics on the eight-row example")
def test_ac5_entropy_gain(record_property):
    ds = builtin_table1()
    root = histogram(ds, range(8))
    h = entropy(root)
    gain_a = information_gain(root, [histogram(ds, [2, 3, 6, 7]), histogram(ds, [0, 1, 4, 5])])
    gain_b = information_gain(root, [histogram(ds, [0, 1, 6, 7]), histogram(ds, [2, 3, 4, 5])])
    # independent oracle: natural-log evaluation of the same formula
    assert h == pytest.approx(direct_entropy([2, 2, 3, 1]), abs=1e-12)
    assert gain_a == pytest.approx(direct_entropy([2, 2, 3, 1]) - direct_entropy([2, 1, 1]), abs=1e-12)
    assert h == pytest.approx(1.90564, abs=1e-5)
    assert gain_a == pytest.approx(0.40564, abs=1e-5)
    assert gain_b == pytest.approx(0.15564, abs=1e-5)
    assert gain_a > gain_b
    record_property("detail", f"H={h:.6f} gain(A)={gain_a:.6f} gain(B)={gain_b:.6f}")


@pytest.mark.acceptance("AC6 uniform random fallback on N4 (5000 +/- 300 of 10,000)")
def test_ac6_uniformity(record_property):
    tree = build_tree(builtin_table1())
    t1 = sum(
        resolve_random(tree, 4, np.random.default_rng(seed)).label == "t1" for seed in range(10_000)
    )
    assert abs(t1 - 5000) <= 300
    record_property("detail", f"t1 chosen {t1} / 10000")


@pytest.mark.acceptance("AC7 comparison harness on tie-heavy data")
def test_ac7_comparison_harness(record_property, capsys):
    ds = generate_tie_heavy(1000, 6, 3, 3, tie_bias=0.5, seed=0)
    seeds = range(50)
    summary = sweep(ds, seeds, method="kfold", k=5)
    assert len(summary.reports) == 50

    for report in summary.reports:
        assert report.folds == 5
        assert report.paired is not None and 0.0 <= report.paired.sign_test_p <= 1.0
        b, r = report.per_strategy["backtrack"], report.per_strategy["random"]
        assert b.total == r.total == 1000
        assert b.tie_rate == r.tie_rate
        # a tie settled above the root exists iff some tied prediction was not randomized
        if b.ties > b.randomized:
            assert b.randomized_rate < r.randomized_rate

    pooled_b = summary.pooled("backtrack")
    pooled_r = summary.pooled("random")
    assert pooled_b.ties > pooled_b.randomized, "no tie was resolvable above the root"
    assert pooled_b.randomized_rate < pooled_r.randomized_rate

    # seed determinism
    for seed in (0, 17, 49):
        again = evaluate(ds, "kfold", 5, seed=seed)
        assert again.to_json() == summary.reports[seed].to_json()

    paired = summary.pooled_paired()
    detail = (
        f"acc backtrack={summary.mean_accuracy('backtrack'):.4f} "
        f"random={summary.mean_accuracy('random'):.4f} "
        f"delta={summary.accuracy_delta:+.4f} (recorded), "
        f"tie_rate={pooled_b.tie_rate:.3f}, randomized_rate {pooled_b.randomized_rate:.3f} "
        f"vs {pooled_r.randomized_rate:.3f}, wins {paired.backtrack_wins}:{paired.random_wins} "
        f"p={paired.sign_test_p:.3g}"
    )
    record_property("detail", detail)
    with capsys.disabled():
        print(f"\n  AC7 {detail}")


@pytest.mark.acceptance("AC8 model JSON and CSV round trips")
def test_ac8_round_trips(record_property):
    rng = np.random.default_rng(3)
    datasets = [builtin_table1()] + [random_dataset(rng, max_rows=100) for _ in range(50)]
    for i, ds in enumerate(datasets):
        tree = annotate_labels(build_tree(ds), "backtrack" if i % 2 == 0 else "random",
                               np.random.default_rng(i))
        text = tree_to_json(tree)
        assert tree_to_json(tree_from_json(text)) == text
        assert tree_from_json(text) == tree

        csv_text = dump_csv(ds)
        once = load_csv(csv_text, ds.outcome_name)
        assert once == ds
        assert load_csv(dump_csv(once), ds.outcome_name) == once
    record_property("detail", f"{len(datasets)} models and datasets")
