"""Command-line entry point.

    clusterpredict run          --input tweets.csv --k 2 --out-dir out/
    clusterpredict compare      --input tweets.csv --out-dir out/
    clusterpredict export-tree  --input tweets.csv --tree-index 0 --dot tree.dot

Exit codes: 0 success, 1 runtime failure, 2 invalid flags or input layout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .corpus_io import SplitSpec, StringLabelRule, ThresholdLabelRule, load_csv
from .errors import (
    ClusterPredictError,
    ConfigError,
    IndexOutOfRange,
    MissingColumn,
)
from .featurizer import TokenizerConfig, Vocabulary
from .hybrid import ClassifierKind, ClassifierSpec, ForestParams, fit_classifier, hybrid_fit
from .ioutil import atomic_write_json, atomic_write_text
from .linear import GdConfig
from .pipeline import (
    fit_and_evaluate,
    prepare,
    run_compare,
    write_compare_outputs,
    write_run_outputs,
)
from .seeding import MASK64, derive
from .trees import ForestConfig, ForestModel, TreeConfig, export_dot

log = logging.getLogger("clusterpredict")

SAMPLE_CORPUS = "sample_corpus.csv"


class UsageError(Exception):
    """Bad flag combination detected after parsing; exits with status 2."""


def _typed(convert, check, what):
    def parse(text):
        try:
            value = convert(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not {what}") from None
        if not check(value):
            raise argparse.ArgumentTypeError(f"{text!r} is not {what}")
        return value
    return parse


open_fraction = _typed(float, lambda v: 0.0 < v < 1.0, "a number in (0, 1)")
closed_fraction = _typed(float, lambda v: 0.0 <= v <= 1.0, "a number in [0, 1]")
positive_int = _typed(int, lambda v: v >= 1, "an integer >= 1")
nonneg_int = _typed(int, lambda v: v >= 0, "an integer >= 0")
seed_u64 = _typed(int, lambda v: 0 <= v <= MASK64, "an unsigned 64-bit integer")
positive_float = _typed(float, lambda v: v > 0, "a number > 0")
nonneg_float = _typed(float, lambda v: v >= 0, "a number >= 0")
real = _typed(float, lambda v: v == v, "a real number")


def _mtry(text):
    if text == "all":
        return "all"
    return positive_int(text)


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    data = p.add_argument_group("data")
    data.add_argument("--input", type=Path, help="labeled CSV (default: bundled synthetic sample)")
    data.add_argument("--text-col", default="text", help="text column name (default: text)")
    data.add_argument("--label-col", default="label", help="label column name (default: label)")
    data.add_argument("--label-threshold", type=real, default=None,
                      help="treat labels as numeric scores; Negative iff score <= threshold")
    data.add_argument("--train-frac", type=open_fraction, default=0.7)
    data.add_argument("--seed", type=seed_u64, default=0)
    data.add_argument("--min-doc-fraction", type=closed_fraction, default=0.005,
                      help="drop terms found in fewer than this fraction of training docs")
    data.add_argument("--keep-stopwords", action="store_true")

    model = p.add_argument_group("models")
    model.add_argument("--n-trees", type=positive_int, default=200)
    model.add_argument("--mtry", type=_mtry, default=None,
                       help="features tried per split: integer or 'all' (default: floor(sqrt(p)))")
    model.add_argument("--no-bootstrap", action="store_true")
    model.add_argument("--max-depth", type=nonneg_int, default=None)
    model.add_argument("--min-samples-split", type=_typed(int, lambda v: v >= 2, "an integer >= 2"),
                       default=2)
    model.add_argument("--min-samples-leaf", type=positive_int, default=1)
    model.add_argument("--min-impurity-decrease", type=nonneg_float, default=0.0)
    model.add_argument("--learning-rate", type=positive_float, default=None,
                       help="default 0.1 (logistic) / 1.0 (SVM step scale)")
    model.add_argument("--l2-lambda", type=nonneg_float, default=1e-3)
    model.add_argument("--epochs", type=positive_int, default=200)

    out = p.add_argument_group("output")
    out.add_argument("--out-dir", type=Path, default=Path("out"))
    out.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    out.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="clusterpredict",
        description="Cluster-then-predict sentiment classification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    run = sub.add_parser("run", parents=[common], help="fit and evaluate the hybrid model")
    run.add_argument("--k", type=positive_int, default=2)
    run.add_argument("--classifier", choices=[c.value for c in ClassifierKind], default="forest")
    run.add_argument("--cluster-before-split", action="store_true",
                     help="fit centroids on train+test rows instead of train rows only")

    cmp_ = sub.add_parser("compare", parents=[common],
                          help="hybrid vs SVM, CART, random forest, logistic regression")
    cmp_.add_argument("--k", type=positive_int, default=2)

    exp = sub.add_parser("export-tree", parents=[common], help="write one forest tree as DOT")
    exp.add_argument("--tree-index", type=nonneg_int, default=0)
    exp.add_argument("--cluster", type=nonneg_int, default=None,
                     help="take the tree from this cluster's forest of a hybrid fit")
    exp.add_argument("--k", type=positive_int, default=2)
    exp.add_argument("--dot", type=Path, default=None, help="DOT path (default: OUT_DIR/tree.dot)")
    exp.add_argument("--forest-json", type=Path, default=None,
                     help="load a saved forest instead of fitting one (needs --vocab-file)")
    exp.add_argument("--vocab-file", type=Path, default=None)
    exp.add_argument("--save-forest", type=Path, default=None,
                     help="also write the forest JSON and a .vocab.txt next to it")
    return parser


def _tree_config(args) -> TreeConfig:
    return TreeConfig(max_depth=args.max_depth, min_samples_split=args.min_samples_split,
                      min_samples_leaf=args.min_samples_leaf,
                      min_impurity_decrease=args.min_impurity_decrease)


def _forest_params(args, n_cols: int | None = None) -> ForestParams:
    mtry = args.mtry
    if mtry == "all":
        mtry = n_cols
    return ForestParams(
        ForestConfig(n_trees=args.n_trees, mtry=mtry, bootstrap=not args.no_bootstrap),
        _tree_config(args),
    )


def _spec(args, kind: ClassifierKind, n_cols: int) -> ClassifierSpec:
    if kind is ClassifierKind.CART:
        return ClassifierSpec(kind, _tree_config(args))
    if kind is ClassifierKind.FOREST:
        if isinstance(args.mtry, int) and args.mtry > n_cols:
            raise UsageError(f"argument --mtry: {args.mtry} exceeds the {n_cols} vocabulary terms")
        return ClassifierSpec(kind, _forest_params(args, n_cols))
    lr = args.learning_rate or (0.1 if kind is ClassifierKind.LOGISTIC else 1.0)
    if kind is ClassifierKind.SVM and args.l2_lambda == 0:
        raise UsageError("argument --l2-lambda: the SVM step schedule needs a value > 0")
    return ClassifierSpec(kind, GdConfig(learning_rate=lr, l2_lambda=args.l2_lambda,
                                         epochs=args.epochs))


def _load(args):
    path = args.input
    if path is None:
        path = resources.files("clusterpredict") / "data" / SAMPLE_CORPUS
        log.info("no --input given, using the bundled sample corpus")
    elif not Path(path).is_file():
        raise UsageError(f"argument --input: no such file: {path}")
    rule = (StringLabelRule() if args.label_threshold is None
            else ThresholdLabelRule(args.label_threshold))
    try:
        docs = load_csv(path, args.text_col, args.label_col, rule)
    except MissingColumn as exc:
        # the text column is checked first, so a label-column message names only it
        flag = "--label-col" if f"column {args.label_col!r}" in str(exc) else "--text-col"
        raise UsageError(f"argument {flag}: {exc}") from None
    tokenizer = TokenizerConfig(remove_stopwords=not args.keep_stopwords)
    return prepare(docs, SplitSpec(args.train_frac, args.seed), tokenizer, args.min_doc_fraction)


def cmd_run(args) -> int:
    prep = _load(args)
    spec = _spec(args, ClassifierKind(args.classifier), len(prep.vocab))
    if args.k > len(prep.train_docs):
        raise UsageError(f"argument --k: {args.k} exceeds the {len(prep.train_docs)} training rows")
    model, report = fit_and_evaluate(prep, args.k, spec, args.seed, args.cluster_before_split)
    written = write_run_outputs(args.out_dir, model, report, prep, figures=not args.no_figures)
    auc = "undefined" if report.auc is None else f"{report.auc:.4f}"
    print(f"accuracy {report.accuracy:.4f}  auc {auc}  baseline {report.baseline_accuracy:.4f}")
    for j, sub in sorted(report.per_cluster.items()):
        if sub.n == 0:
            print(f"  cluster {j}: no test rows")
            continue
        sub_auc = "undefined" if sub.auc is None else f"{sub.auc:.4f}"
        print(f"  cluster {j}: n={sub.n} accuracy {sub.accuracy:.4f} auc {sub_auc}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_compare(args) -> int:
    prep = _load(args)
    n_cols = len(prep.vocab)
    specs = {kind: _spec(args, kind, n_cols) for kind in ClassifierKind}
    rows = run_compare(prep, args.k, args.seed, specs)
    written = write_compare_outputs(args.out_dir, rows, prep, args.k, args.seed,
                                    figures=not args.no_figures)
    width = max(len(r.technique) for r in rows)
    print(f"{'technique':<{width}}  accuracy  auc")
    for r in rows:
        auc = "  n/a " if r.auc is None else f"{r.auc:.4f}"
        print(f"{r.technique:<{width}}  {r.accuracy:.4f}    {auc}")
    print(f"baseline accuracy {rows[0].report.baseline_accuracy:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_export_tree(args) -> int:
    if args.forest_json is not None:
        if args.vocab_file is None:
            raise UsageError("argument --forest-json: --vocab-file is required with a saved forest")
        forest = ForestModel.from_json(json.loads(args.forest_json.read_text(encoding="utf-8")))
        vocab = Vocabulary.load(args.vocab_file)
    else:
        prep = _load(args)
        vocab = prep.vocab
        spec = _spec(args, ClassifierKind.FOREST, len(vocab))
        if args.cluster is None:
            forest = fit_classifier(spec, prep.X_train.to_dense(), prep.y_train, derive(args.seed, 0))
        else:
            if args.cluster >= args.k:
                raise UsageError(f"argument --cluster: {args.cluster} is not below --k {args.k}")
            model = hybrid_fit(prep.X_train, prep.y_train, args.k, spec, args.seed, vocab=vocab)
            forest = model.per_cluster[args.cluster]
            if not isinstance(forest, ForestModel):
                raise ClusterPredictError(
                    f"cluster {args.cluster} is single-label and has no trees to export"
                )
    if args.tree_index >= forest.n_trees:
        raise IndexOutOfRange(
            f"argument --tree-index: {args.tree_index} is out of range for {forest.n_trees} tree(s)"
        )
    dot_path = args.dot or args.out_dir / "tree.dot"
    atomic_write_text(dot_path, export_dot(forest.trees[args.tree_index], vocab))
    print(f"wrote {dot_path}")
    if args.save_forest is not None:
        atomic_write_json(args.save_forest, forest.to_json())
        vocab_path = args.save_forest.with_suffix(".vocab.txt")
        vocab.save(vocab_path)
        print(f"wrote {args.save_forest}")
        print(f"wrote {vocab_path}")
    return 0


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "export-tree": cmd_export_tree}

# errors caused by how the tool was invoked rather than by the data
USAGE_ERRORS = (UsageError, ConfigError, IndexOutOfRange)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as exc:
        parser.print_usage(sys.stderr)
        print(f"clusterpredict: error: {exc}", file=sys.stderr)
        return 2
    except ClusterPredictError as exc:
        print(f"clusterpredict: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # never show a traceback to the user
        log.debug("unhandled error", exc_info=True)
        print(f"clusterpredict: unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
