"""Cluster-then-predict: K-means routing in front of one classifier per cluster."""

from __future__ import annotations

import dataclasses
import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .clustering import KMeansConfig, KMeansModel, assign_rows, kmeans_fit
from .errors import ConfigError, DimensionMismatch, LengthMismatch
from .evaluation import EvaluationReport, evaluate, mean_defined
from .featurizer import FeatureMatrix, Vocabulary, as_dense
from .linear import SVM_DEFAULTS, GdConfig, LinearModel, logistic_fit, svm_fit
from .seeding import check_seed, derive
from .trees import DecisionTree, ForestConfig, ForestModel, TreeConfig, cart_fit, forest_fit


class ClassifierKind(str, enum.Enum):
    CART = "cart"
    FOREST = "forest"
    LOGISTIC = "logistic"
    SVM = "svm"


@dataclass(frozen=True)
class ForestParams:
    forest: ForestConfig = ForestConfig()
    tree: TreeConfig = TreeConfig()


_PARAM_TYPES = {
    ClassifierKind.CART: TreeConfig,
    ClassifierKind.FOREST: ForestParams,
    ClassifierKind.LOGISTIC: GdConfig,
    ClassifierKind.SVM: GdConfig,
}


def _default_params(kind: ClassifierKind):
    return {
        ClassifierKind.CART: TreeConfig(),
        ClassifierKind.FOREST: ForestParams(),
        ClassifierKind.LOGISTIC: GdConfig(),
        ClassifierKind.SVM: SVM_DEFAULTS,
    }[kind]


@dataclass(frozen=True)
class ClassifierSpec:
    kind: ClassifierKind = ClassifierKind.FOREST
    params: TreeConfig | ForestParams | GdConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        if self.params is None:
            object.__setattr__(self, "params", _default_params(self.kind))
        if not isinstance(self.params, _PARAM_TYPES[self.kind]):
            raise ConfigError(
                f"{self.kind.value} expects {_PARAM_TYPES[self.kind].__name__}, "
                f"got {type(self.params).__name__}"
            )

    @property
    def threshold(self) -> float:
        return 0.0 if self.kind is ClassifierKind.SVM else 0.5


@dataclass(frozen=True)
class ConstantClassifier:
    """Scores every row with one value; used for clusters that cannot be trained."""

    score: float
    n_cols: int

    def scores(self, matrix) -> np.ndarray:
        X = as_dense(matrix)
        if X.shape[1] != self.n_cols:
            raise DimensionMismatch(f"matrix has {X.shape[1]} columns, expected {self.n_cols}")
        return np.full(X.shape[0], self.score)


Classifier = DecisionTree | ForestModel | LinearModel | ConstantClassifier


def fit_classifier(spec: ClassifierSpec, X: np.ndarray, y: np.ndarray, seed: int) -> Classifier:
    """Train ``spec`` with its seed replaced by ``seed``."""
    p = spec.params
    if spec.kind is ClassifierKind.CART:
        return cart_fit(X, y, p, seed=seed)
    if spec.kind is ClassifierKind.FOREST:
        return forest_fit(X, y, dataclasses.replace(p.forest, seed=seed), p.tree)
    if spec.kind is ClassifierKind.LOGISTIC:
        return logistic_fit(X, y, dataclasses.replace(p, seed=seed))
    return svm_fit(X, y, dataclasses.replace(p, seed=seed))


def constant_for(spec: ClassifierSpec, positive: bool, n_cols: int) -> ConstantClassifier:
    """Constant scorer on the scale of ``spec``'s scores: 0/1, or -1/+1 for SVM margins."""
    if spec.kind is ClassifierKind.SVM:
        return ConstantClassifier(1.0 if positive else -1.0, n_cols)
    return ConstantClassifier(1.0 if positive else 0.0, n_cols)


@dataclass(frozen=True, eq=False)
class ClusterThenPredictModel:
    kmeans: KMeansModel
    per_cluster: dict[int, Classifier]
    spec: ClassifierSpec
    master_seed: int
    train_cluster_sizes: tuple[int, ...]
    vocab: Vocabulary | None = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.kmeans.k


def hybrid_fit(
    train_matrix: FeatureMatrix | np.ndarray,
    train_labels,
    k: int = 2,
    spec: ClassifierSpec = ClassifierSpec(),
    master_seed: int = 0,
    vocab: Vocabulary | None = None,
    cluster_matrix: FeatureMatrix | np.ndarray | None = None,
    max_iterations: int = 100,
) -> ClusterThenPredictModel:
    """Cluster the training rows, then fit ``spec`` on each cluster's rows.

    K-means is seeded with ``derive(master_seed, "kmeans")`` and the
    classifier of cluster ``j`` with ``derive(master_seed, j)``. Passing
    ``cluster_matrix`` fits the centroids on those rows instead (e.g. the
    whole corpus, to mimic clustering before the split); training rows are
    then assigned to their nearest centroid.

    A cluster whose training rows all carry one label gets a constant
    classifier. A cluster with no training rows (possible only with
    ``cluster_matrix``) gets a constant classifier for the overall training
    majority.
    """
    X = as_dense(train_matrix)
    y = np.asarray(train_labels, dtype=np.int64)
    if y.shape != (X.shape[0],):
        raise LengthMismatch(f"{y.size} labels for {X.shape[0]} training rows")
    check_seed(master_seed)
    km_config = KMeansConfig(k=k, seed=derive(master_seed, "kmeans"), max_iterations=max_iterations)
    if cluster_matrix is None:
        km = kmeans_fit(X, km_config)
        assignment = km.assignments
    else:
        C = as_dense(cluster_matrix)
        if C.shape[1] != X.shape[1]:
            raise DimensionMismatch("cluster_matrix and train_matrix differ in columns")
        km = kmeans_fit(C, km_config)
        assignment = assign_rows(km, X)

    notes = []
    per_cluster: dict[int, Classifier] = {}
    sizes = np.bincount(assignment, minlength=k)
    majority_positive = 2 * int(y.sum()) >= y.size
    for j in range(k):
        rows = np.flatnonzero(assignment == j)
        yj = y[rows]
        if rows.size == 0:
            per_cluster[j] = constant_for(spec, majority_positive, X.shape[1])
            notes.append(f"cluster {j} has no training rows; constant majority classifier used")
        elif yj.min() == yj.max():
            per_cluster[j] = constant_for(spec, bool(yj[0]), X.shape[1])
            if rows.size == 1:
                notes.append(f"cluster {j} has a single training row; constant classifier used")
        else:
            per_cluster[j] = fit_classifier(spec, X[rows], yj, derive(master_seed, j))
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return ClusterThenPredictModel(
        kmeans=km,
        per_cluster=per_cluster,
        spec=spec,
        master_seed=master_seed,
        train_cluster_sizes=tuple(int(s) for s in sizes),
        vocab=vocab,
        warnings=tuple(notes),
    )


def _predict(model: ClusterThenPredictModel, test_matrix) -> tuple[np.ndarray, np.ndarray]:
    X = as_dense(test_matrix)
    if X.shape[1] != model.kmeans.n_cols:
        raise DimensionMismatch(
            f"test matrix has {X.shape[1]} columns, model was trained on {model.kmeans.n_cols}"
        )
    clusters = assign_rows(model.kmeans, X)
    scores = np.empty(X.shape[0])
    for j, clf in model.per_cluster.items():
        rows = np.flatnonzero(clusters == j)
        if rows.size:
            scores[rows] = clf.scores(X[rows])
    return clusters, scores


def hybrid_predict(model: ClusterThenPredictModel, test_matrix) -> list[tuple[int, float]]:
    """``(cluster id, score)`` for every test row, in row order."""
    clusters, scores = _predict(model, test_matrix)
    return [(int(c), float(s)) for c, s in zip(clusters, scores)]


def _minmax_by_cluster(scores: np.ndarray, clusters: np.ndarray, threshold: float) -> np.ndarray:
    out = np.empty_like(scores)
    for j in np.unique(clusters):
        rows = clusters == j
        s = scores[rows]
        lo, hi = s.min(), s.max()
        if hi > lo:
            out[rows] = (s - lo) / (hi - lo)
        else:
            out[rows] = np.where(s >= threshold, 1.0, 0.0)
    return out


def hybrid_evaluate(model: ClusterThenPredictModel, test_matrix, test_labels) -> EvaluationReport:
    """Pooled report over all test rows plus one sub-report per cluster.

    Pooled AUC ranks all scores jointly. SVM margins are not comparable
    across clusters, so for SVM specs each cluster's margins are min-max
    rescaled to [0, 1] before pooling; accuracy still uses the raw margins.
    """
    y = np.asarray(test_labels, dtype=np.int64)
    clusters, scores = _predict(model, test_matrix)
    if y.shape != scores.shape:
        raise LengthMismatch(f"{y.size} labels for {scores.size} test rows")
    thr = model.spec.threshold
    auc_scores = (_minmax_by_cluster(scores, clusters, thr)
                  if model.spec.kind is ClassifierKind.SVM else None)
    report = evaluate(y, scores, thr, auc_scores)

    per_cluster = {}
    for j in range(model.k):
        rows = np.flatnonzero(clusters == j)
        per_cluster[j] = evaluate(y[rows], scores[rows], thr) if rows.size else EvaluationReport.empty()
    report.per_cluster = per_cluster
    report.auc_cluster_mean = mean_defined([r.auc for r in per_cluster.values()])
    return report


class Interpretability(str, enum.Enum):
    HIGH = "High"
    LOW = "Low"


@dataclass
class ComparisonRow:
    technique: str
    accuracy: float
    auc: float | None
    interpretability: Interpretability
    report: EvaluationReport | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {
            "technique": self.technique,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "interpretability": self.interpretability.value,
        }


HYBRID = "Proposed hybrid approach"
TECHNIQUES = (
    (HYBRID, ClassifierKind.FOREST, Interpretability.HIGH),
    ("SVM", ClassifierKind.SVM, Interpretability.LOW),
    ("CART", ClassifierKind.CART, Interpretability.HIGH),
    ("Random forest", ClassifierKind.FOREST, Interpretability.HIGH),
    ("Logistic Regression", ClassifierKind.LOGISTIC, Interpretability.LOW),
)


def _standalone_report(clf: Classifier, spec: ClassifierSpec, X_test, y_test) -> EvaluationReport:
    return evaluate(y_test, clf.scores(X_test), spec.threshold)


def compare_all(
    train_matrix,
    train_labels,
    test_matrix,
    test_labels,
    k: int = 2,
    seed: int = 0,
    specs: dict[ClassifierKind, ClassifierSpec] | None = None,
) -> list[ComparisonRow]:
    """The hybrid (forest per cluster) against four standalone models.

    Rows follow the order hybrid, SVM, CART, Random forest, Logistic
    Regression. Standalone models are seeded with ``derive(seed, 0)``, the
    same seed cluster 0 of the hybrid receives.
    """
    specs = dict(specs or {})
    for kind in ClassifierKind:
        specs.setdefault(kind, ClassifierSpec(kind))
    X_train, X_test = as_dense(train_matrix), as_dense(test_matrix)
    y_train = np.asarray(train_labels, dtype=np.int64)
    y_test = np.asarray(test_labels, dtype=np.int64)

    rows = []
    for name, kind, interp in TECHNIQUES:
        spec = specs[kind]
        if name == HYBRID:
            model = hybrid_fit(X_train, y_train, k, spec, seed)
            report = hybrid_evaluate(model, X_test, y_test)
        else:
            clf = fit_classifier(spec, X_train, y_train, derive(seed, 0))
            report = _standalone_report(clf, spec, X_test, y_test)
        rows.append(ComparisonRow(name, report.accuracy, report.auc, interp, report))
    return rows


def comparison_csv(rows: list[ComparisonRow]) -> str:
    lines = ["technique,accuracy,auc,interpretability"]
    for r in rows:
        auc = "" if r.auc is None else f"{r.auc:.9f}"
        lines.append(f"{r.technique},{r.accuracy:.9f},{auc},{r.interpretability.value}")
    return "\n".join(lines) + "\n"

