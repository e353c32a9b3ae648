"""End-to-end flow: corpus -> split -> features -> models -> reports on disk."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus_io import LabeledDocument, SplitSpec, split_train_test
from .evaluation import EvaluationReport, emit_roc_csv
from .featurizer import FeatureMatrix, TokenizerConfig, Vocabulary, build_vocabulary, vectorize
from .hybrid import (
    ClassifierSpec,
    ClusterThenPredictModel,
    ComparisonRow,
    compare_all,
    comparison_csv,
    hybrid_evaluate,
    hybrid_fit,
)
from .ioutil import atomic_write_json, atomic_write_text

log = logging.getLogger(__name__)

# Published reference results on a 1200-tweet corpus that is not available;
# kept for side-by-side display only, never used as a test oracle.
REFERENCE_RESULTS = {
    "Proposed hybrid approach": (0.7233, 0.7493671),
    "SVM": (0.7033, 0.6934278),
    "CART": (0.6497, 0.6441454),
    "Random forest": (0.7062, 0.7473476),
    "Logistic Regression": (0.6440, 0.6441454),
}
REFERENCE_BASELINE = 0.5423


@dataclass(frozen=True)
class Prepared:
    train_docs: list[LabeledDocument]
    test_docs: list[LabeledDocument]
    vocab: Vocabulary
    X_train: FeatureMatrix
    X_test: FeatureMatrix
    y_train: np.ndarray
    y_test: np.ndarray
    tokenizer: TokenizerConfig


def labels_of(docs: Sequence[LabeledDocument]) -> np.ndarray:
    return np.array([int(d.label) for d in docs], dtype=np.int64)


def prepare(
    docs: Sequence[LabeledDocument],
    split: SplitSpec = SplitSpec(),
    tokenizer: TokenizerConfig = TokenizerConfig(),
    min_doc_fraction: float = 0.005,
) -> Prepared:
    """Split, then build the vocabulary on the training side only."""
    train, test = split_train_test(docs, split)
    vocab = build_vocabulary(train, tokenizer, min_doc_fraction)
    log.info("split %d/%d, vocabulary of %d terms", len(train), len(test), len(vocab))
    return Prepared(
        train, test, vocab,
        vectorize(train, vocab, tokenizer), vectorize(test, vocab, tokenizer),
        labels_of(train), labels_of(test), tokenizer,
    )


def fit_and_evaluate(
    prep: Prepared,
    k: int = 2,
    spec: ClassifierSpec = ClassifierSpec(),
    seed: int = 0,
    cluster_before_split: bool = False,
) -> tuple[ClusterThenPredictModel, EvaluationReport]:
    cluster_rows = None
    if cluster_before_split:
        # centroids see the test rows too (clustering done before the split)
        cluster_rows = np.vstack([prep.X_train.to_dense(), prep.X_test.to_dense()])
    model = hybrid_fit(prep.X_train, prep.y_train, k, spec, seed,
                       vocab=prep.vocab, cluster_matrix=cluster_rows)
    return model, hybrid_evaluate(model, prep.X_test, prep.y_test)


def run_report_json(model: ClusterThenPredictModel, report: EvaluationReport, prep: Prepared) -> dict:
    out = report.to_json()
    out.update({
        "k": model.k,
        "cluster_sizes": list(model.train_cluster_sizes),
        "classifier": model.spec.kind.value,
        "seed": model.master_seed,
        "n_train": len(prep.train_docs),
        "n_test": len(prep.test_docs),
        "vocabulary_size": len(prep.vocab),
        "kmeans_objective": model.kmeans.objective,
        "kmeans_iterations": model.kmeans.iterations_run,
        "warnings": list(model.warnings),
    })
    return out


def write_run_outputs(out_dir: Path, model: ClusterThenPredictModel, report: EvaluationReport,
                      prep: Prepared, figures: bool = True) -> list[Path]:
    """Report JSON plus ``roc_pooled.csv`` and ``roc_cluster{j}.csv`` files.

    A curve that is undefined (single-class test rows) is not written and
    its ``roc_file`` entry in the report is ``null``.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    payload = run_report_json(model, report, prep)
    curves = {"pooled": report.roc}
    curves.update({f"cluster{j}": sub.roc for j, sub in sorted(report.per_cluster.items())})
    files = {}
    for name, roc in curves.items():
        path = out_dir / f"roc_{name}.csv"
        if roc is None:
            files[name] = None
            continue
        emit_roc_csv(roc, path)
        files[name] = path.name
        written.append(path)
    payload["roc_file"] = files.pop("pooled")
    for j, sub in payload["per_cluster"].items():
        sub["roc_file"] = files[f"cluster{j}"]
    report_path = out_dir / "report.json"
    atomic_write_json(report_path, payload)
    written.insert(0, report_path)
    if figures:
        from .plotting import plot_roc_curves

        labels = {"pooled": f"pooled (AUC {report.auc:.3f})" if report.auc is not None else "pooled"}
        for j, sub in report.per_cluster.items():
            if sub.roc is not None:
                labels[f"cluster{j}"] = f"cluster {j} (AUC {sub.auc:.3f})"
        fig_path = out_dir / "roc.png"
        plot_roc_curves({labels[n]: c for n, c in curves.items() if c is not None}, fig_path,
                        title=f"Cluster-then-predict ROC, k={model.k}")
        written.append(fig_path)
    return written


def compare_report_json(rows: list[ComparisonRow], prep: Prepared, k: int, seed: int) -> dict:
    hybrid = rows[0].report
    return {
        "k": k,
        "seed": seed,
        "n_train": len(prep.train_docs),
        "n_test": len(prep.test_docs),
        "vocabulary_size": len(prep.vocab),
        "baseline_accuracy": hybrid.baseline_accuracy,
        "comparison": [r.to_json() for r in rows],
        "reference": {
            "baseline_accuracy": REFERENCE_BASELINE,
            "rows": [{"technique": t, "accuracy": a, "auc": u}
                     for t, (a, u) in REFERENCE_RESULTS.items()],
        },
    }


def run_compare(prep: Prepared, k: int = 2, seed: int = 0,
                specs=None) -> list[ComparisonRow]:
    return compare_all(prep.X_train, prep.y_train, prep.X_test, prep.y_test, k, seed, specs)


def write_compare_outputs(out_dir: Path, rows: list[ComparisonRow], prep: Prepared,
                          k: int, seed: int, figures: bool = True) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out_dir / "comparison.csv", out_dir / "comparison.json"
    atomic_write_text(csv_path, comparison_csv(rows))
    atomic_write_json(json_path, compare_report_json(rows, prep, k, seed))
    written = [csv_path, json_path]
    if figures:
        from .plotting import plot_comparison, plot_roc_curves

        curves = {f"{r.technique} (AUC {r.auc:.3f})": r.report.roc
                  for r in rows if r.report is not None and r.report.roc is not None}
        plot_roc_curves(curves, out_dir / "roc_comparison.png", title="ROC by technique")
        plot_comparison(rows, out_dir / "comparison.png",
                        baseline=rows[0].report.baseline_accuracy)
        written += [out_dir / "roc_comparison.png", out_dir / "comparison.png"]
    return written
