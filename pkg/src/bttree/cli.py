"""Command-line interface: train, predict, evaluate, compare, verify, generate.

Exit codes: 0 success, 1 usage or validation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, induction, oracle, predictor
from .dataset import DatasetError, builtin_table1, dump_csv, load_csv
from .predictor import TieStrategy

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def node_label(node_id: int) -> str:
    return f"N{node_id}"


def node_rng(seed: int, node_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(node_id,)))


def parse_query(text: str) -> dict[str, str]:
    """Parse ``"k=v,k=v"``; keys may contain spaces, each pair splits on its first ``=``."""
    query = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"malformed query pair {part.strip()!r}; expected name=value")
        key, value = part.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise UsageError(f"query pair {part.strip()!r} has an empty attribute name")
        if key in query:
            raise UsageError(f"attribute {key!r} given twice in query")
        query[key] = value
    if not query:
        raise UsageError("empty query")
    return query


def _load_dataset(args):
    try:
        with open(args.data, "rb") as fh:
            return load_csv(fh, args.outcome_col)
    except OSError as exc:
        raise UsageError(f"cannot read {args.data}: {exc.strerror or exc}") from exc


def cmd_train(args) -> int:
    dataset = _load_dataset(args)
    tree = induction.build_tree(dataset)
    rng = np.random.default_rng(args.seed)
    tree = predictor.annotate_labels(tree, args.tie_strategy, rng)
    text = induction.tree_to_json(tree)
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    print(f"nodes: {len(tree)}")
    print(f"leaves: {len(tree.leaves())}")
    for leaf in tree.leaves():
        print(f"{node_label(leaf)}\t{tree.node(leaf).resolved_label}")
    return EXIT_OK


def _queries_from_csv(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if reader.fieldnames is None:
        raise UsageError(f"{path} has no header row")
    for row in reader:
        yield {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}


def cmd_predict(args) -> int:
    try:
        tree = induction.tree_from_json(Path(args.model).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {args.model}: {exc.strerror or exc}") from exc
    strategy = TieStrategy(args.tie_strategy or tree.label_strategy or TieStrategy.BACKTRACK)
    if args.query is not None:
        queries = [parse_query(args.query)]
        known = set(tree.attribute_names)
        unknown = [k for k in queries[0] if k not in known]
        if unknown:
            raise UsageError(f"unknown attribute(s) {unknown}; model has {list(tree.attribute_names)}")
    else:
        queries = _queries_from_csv(args.data)
    rng = np.random.default_rng(args.seed)
    for query in queries:
        try:
            result = predictor.predict(tree, query, strategy, rng, use_resolved=True)
        except predictor.MissingAttributeError as exc:
            raise UsageError(str(exc)) from exc
        print(result.to_json() if args.trace else result.label)
    return EXIT_OK


def _run_evaluation(args, strategies) -> int:
    dataset = _load_dataset(args)
    try:
        report = evaluation.evaluate(dataset, args.method, args.k, strategies, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.tie_strategy == "both":
        strategies = [TieStrategy.BACKTRACK, TieStrategy.RANDOM]
    else:
        strategies = [TieStrategy(args.tie_strategy)]
    return _run_evaluation(args, strategies)


def cmd_compare(args) -> int:
    return _run_evaluation(args, [TieStrategy.BACKTRACK, TieStrategy.RANDOM])


def verify_tree(dataset, tree, seed: int = 0, resolver=None):
    """Check every leaf's backtrack resolution against the row-level oracle.

    Yields ``(leaf, ok, prediction, oracle_result)``. Both sides draw from
    the same per-leaf stream, so agreeing candidate sets give agreeing labels.
    """
    resolver = resolver or predictor.resolve_backtrack
    for leaf in tree.leaves():
        got = resolver(tree, leaf, node_rng(seed, leaf))
        want = oracle.oracle_trace(
            dataset, induction.path_constraints(tree, leaf), node_rng(seed, leaf)
        )
        ok = got.randomized == want.randomized and got.label == want.label
        if ok and got.randomized:
            ok = tuple(got.steps[-1].candidates) == tuple(want.candidates)
        yield leaf, ok, got, want


def cmd_verify(args) -> int:
    dataset = _load_dataset(args)
    tree = induction.build_tree(dataset)
    failures = 0
    for leaf, ok, got, want in verify_tree(dataset, tree, args.seed):
        if ok:
            print(f"PASS {node_label(leaf)} {got.label}")
            continue
        failures += 1
        print(f"FAIL {node_label(leaf)}")
        print(f"  tree:   {got.to_json()}")
        oracle_doc = {
            "label": want.label,
            "candidates": list(want.candidates),
            "randomized": want.randomized,
            "prefix_lengths": list(want.prefix_lengths),
        }
        print(f"  oracle: {json.dumps(oracle_doc, sort_keys=True)}")
    total = len(tree.leaves())
    print(f"{total - failures}/{total} leaves agree")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def cmd_generate(args) -> int:
    if args.table1:
        dataset = builtin_table1()
    else:
        try:
            dataset = evaluation.generate_tie_heavy(
                args.rows, args.attributes, args.values, args.outcomes, args.tie_bias, args.seed
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    text = dump_csv(dataset)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _add_data_args(p):
    p.add_argument("--data", required=True, help="training CSV with a header row")
    p.add_argument("--outcome-col", required=True, help="name of the outcome column")


def _add_eval_args(p):
    _add_data_args(p)
    p.add_argument("--method", choices=evaluation.METHODS, default="loo")
    p.add_argument("--k", type=int, default=None, help="number of folds for kfold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bttree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    strategies = [s.value for s in TieStrategy]

    p = sub.add_parser("train", help="build a tree and write the model JSON")
    _add_data_args(p)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--tie-strategy", choices=strategies, default="backtrack")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a trained model")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--query", help='e.g. "Attr A=a0,Attr B=b0"')
    group.add_argument("--data", help="CSV of queries; extra columns are ignored")
    p.add_argument("--trace", action="store_true", help="print the full prediction as JSON")
    p.add_argument("--tie-strategy", choices=strategies, default=None,
                   help="defaults to the strategy the model was labelled with")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validated accuracy")
    _add_eval_args(p)
    p.add_argument("--tie-strategy", choices=[*strategies, "both"], default="backtrack")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="paired backtrack vs random comparison")
    _add_eval_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="check every leaf against the brute-force oracle")
    _add_data_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a dataset as CSV")
    p.add_argument("--out", default="-")
    p.add_argument("--table1", action="store_true", help="the built-in eight-row example")
    p.add_argument("--rows", type=int, default=1000)
    p.add_argument("--attributes", type=int, default=6)
    p.add_argument("--values", type=int, default=3)
    p.add_argument("--outcomes", type=int, default=3)
    p.add_argument("--tie-bias", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, induction.ModelFormatError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
