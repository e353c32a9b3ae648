"""CART trees with Gini splits and bagged random forests.

Trees are stored as flat arrays in preorder (node 0 is the root, a left child
always directly follows its parent). Splits are numeric thresholds placed at
midpoints between adjacent observed values; rows with ``x[feature] <
threshold`` go left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyCounts,
    MtryTooLarge,
    ShapeMismatch,
    VocabMismatch,
)
from .featurizer import Vocabulary, as_dense, as_dense_row
from .seeding import check_seed, derive, rng_for

LEAF = -1


def gini(class_counts: Sequence[int]) -> float:
    """Gini impurity ``1 - sum(p_c ** 2)`` of a (negative, positive) count pair.

    >>> gini((6, 2))
    0.375
    """
    counts = [int(c) for c in class_counts]
    if any(c < 0 for c in counts):
        raise EmptyCounts(f"class counts must be non-negative, got {counts}")
    total = sum(counts)
    if total == 0:
        raise EmptyCounts("gini of an empty node is undefined")
    return 1.0 - sum((c / total) ** 2 for c in counts)


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    min_impurity_decrease: float = 0.0

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError(f"max_depth must be >= 0 or None, got {self.max_depth}")
        if self.min_samples_split < 2:
            raise ConfigError(f"min_samples_split must be >= 2, got {self.min_samples_split}")
        if self.min_samples_leaf < 1:
            raise ConfigError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.min_impurity_decrease < 0:
            raise ConfigError("min_impurity_decrease must be >= 0")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    mtry: int | None = None  # None -> floor(sqrt(n_cols))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.mtry is not None and self.mtry < 1:
            raise ConfigError(f"mtry must be >= 1, got {self.mtry}")
        check_seed(self.seed)


# Nested view, for inspection and tests. Fitting and scoring use DecisionTree.
@dataclass(frozen=True)
class Leaf:
    positive_fraction: float
    sample_count: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Split | Leaf


@dataclass(frozen=True, eq=False)
class DecisionTree:
    n_cols: int
    feature: np.ndarray            # int, LEAF for leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    positive_fraction: np.ndarray  # meaningful at leaves
    sample_count: np.ndarray

    _FIELDS = ("feature", "threshold", "left", "right", "positive_fraction", "sample_count")

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == LEAF

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if not self.is_leaf(i):
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return self.n_cols == other.n_cols and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in self._FIELDS
        )

    def __hash__(self):
        return hash((self.n_cols, self.feature.tobytes(), self.threshold.tobytes()))

    @property
    def root(self) -> TreeNode:
        nodes: list[TreeNode | None] = [None] * self.n_nodes
        # children always carry larger preorder ids than their parent
        for i in reversed(range(self.n_nodes)):
            if self.is_leaf(i):
                nodes[i] = Leaf(float(self.positive_fraction[i]), int(self.sample_count[i]))
            else:
                nodes[i] = Split(int(self.feature[i]), float(self.threshold[i]),
                                 nodes[self.left[i]], nodes[self.right[i]])
        return nodes[0]

    def leaf_index(self, X: np.ndarray) -> np.ndarray:
        """Preorder id of the leaf each row of ``X`` lands in."""
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            feat = self.feature[node]
            active = feat != LEAF
            if not active.any():
                return node
            r, nd = rows[active], node[active]
            go_left = X[r, feat[active]] < self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])

    def scores(self, matrix) -> np.ndarray:
        X = as_dense(matrix)
        if X.shape[1] != self.n_cols:
            raise DimensionMismatch(f"matrix has {X.shape[1]} columns, tree expects {self.n_cols}")
        return self.positive_fraction[self.leaf_index(X)]

    def to_json(self) -> dict:
        return {
            "n_cols": self.n_cols,
            **{f: getattr(self, f).tolist() for f in self._FIELDS},
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecisionTree":
        ints = {"feature", "left", "right", "sample_count"}
        return cls(
            n_cols=int(data["n_cols"]),
            **{f: np.asarray(data[f], dtype=np.intp if f in ints else np.float64)
               for f in cls._FIELDS},
        )


def _check_xy(matrix, labels) -> tuple[np.ndarray, np.ndarray]:
    X = as_dense(matrix)
    y = np.asarray(labels, dtype=np.int64)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ShapeMismatch(f"{y.shape[0] if y.ndim else 0} labels for {X.shape[0]} rows")
    if X.shape[0] == 0:
        raise ShapeMismatch("cannot fit a tree on zero rows")
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 (negative) or 1 (positive)")
    return X, y


_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def _next_u64(state):
    # SplitMix64; state is a length-1 uint64 array advanced in place
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _grow_kernel(X, y, max_depth, min_split, min_leaf, min_decrease, mtry, seed):
    """Grow one tree depth-first; returns the six preorder node arrays.

    Each node owns a contiguous slice of ``idx``; a split stably partitions
    that slice in place. With ``mtry > 0`` the split search at a node is
    restricted to ``mtry`` of its non-constant features, drawn without
    replacement from a SplitMix64 stream started at ``seed``.
    """
    n, p = X.shape
    cap = 2 * n - 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    frac = np.zeros(cap)
    count = np.zeros(cap, dtype=np.int64)

    idx = np.arange(n)
    buf = np.empty(n, dtype=np.int64)
    vals = np.empty(n)
    labs = np.empty(n, dtype=np.int64)
    movable = np.empty(p, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)

    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_parent = np.empty(cap, dtype=np.int64)
    st_left = np.empty(cap, dtype=np.bool_)
    top = 0
    st_start[0], st_end[0], st_depth[0], st_parent[0], st_left[0] = 0, n, 0, -1, False
    top = 1
    n_nodes = 0

    while top > 0:
        top -= 1
        start, end, depth = st_start[top], st_end[top], st_depth[top]
        parent, is_left = st_parent[top], st_left[top]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                left[parent] = node
            else:
                right[parent] = node
        m = end - start
        n_pos = 0
        for i in range(start, end):
            n_pos += y[idx[i]]
        frac[node] = n_pos / m
        count[node] = m

        if n_pos == 0 or n_pos == m:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        if m < min_split or m < 2 * min_leaf:
            continue

        n_mov = 0
        for f in range(p):
            first = X[idx[start], f]
            for i in range(start + 1, end):
                if X[idx[i], f] != first:
                    movable[n_mov] = f
                    n_mov += 1
                    break
        if n_mov == 0:
            continue
        n_cand = n_mov
        if mtry > 0 and mtry < n_mov:
            # partial Fisher-Yates: movable[:mtry] becomes a uniform subset
            for i in range(mtry):
                r = _next_u64(state)
                span = np.uint64(n_mov - i)
                j = i + np.int64(((r >> np.uint64(32)) * span) >> np.uint64(32))
                movable[i], movable[j] = movable[j], movable[i]
            n_cand = mtry
            movable[:n_cand].sort()

        best_score = -np.inf
        best_f = -1
        best_thr = 0.0
        for c in range(n_cand):
            f = movable[c]
            for i in range(m):
                vals[i] = X[idx[start + i], f]
            order = np.argsort(vals[:m])
            pos_left = 0
            for i in range(m - 1):
                pos_left += y[idx[start + order[i]]]
                v, v_next = vals[order[i]], vals[order[i + 1]]
                n_left = i + 1
                n_right = m - n_left
                if v == v_next or n_left < min_leaf or n_right < min_leaf:
                    continue
                neg_left = n_left - pos_left
                pos_right = n_pos - pos_left
                neg_right = n_right - pos_right
                # integer numerators: equal count tuples score bit-identically
                score = ((pos_left * pos_left + neg_left * neg_left) / n_left
                         + (pos_right * pos_right + neg_right * neg_right) / n_right)
                if score > best_score:
                    best_score = score
                    best_f = f
                    best_thr = (v + v_next) / 2.0
        if best_f < 0:
            continue
        if min_decrease > 0.0:
            parent_score = (n_pos * n_pos + (m - n_pos) * (m - n_pos)) / m
            if (best_score - parent_score) / m < min_decrease:
                continue

        feature[node] = best_f
        threshold[node] = best_thr
        n_l = 0
        n_r = 0
        for i in range(start, end):
            row = idx[i]
            if X[row, best_f] < best_thr:
                idx[start + n_l] = row
                n_l += 1
            else:
                buf[n_r] = row
                n_r += 1
        for i in range(n_r):
            idx[start + n_l + i] = buf[i]
        # right is pushed first so the left subtree gets the next preorder ids
        st_start[top], st_end[top], st_depth[top] = start + n_l, end, depth + 1
        st_parent[top], st_left[top] = node, False
        top += 1
        st_start[top], st_end[top], st_depth[top] = start, start + n_l, depth + 1
        st_parent[top], st_left[top] = node, True
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
            frac[:n_nodes], count[:n_nodes])


def _grow(X: np.ndarray, y: np.ndarray, config: TreeConfig, mtry: int | None,
          feature_seed: int = 0) -> DecisionTree:
    arrays = _grow_kernel(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.int64),
        -1 if config.max_depth is None else config.max_depth,
        config.min_samples_split,
        config.min_samples_leaf,
        float(config.min_impurity_decrease),
        0 if mtry is None else mtry,
        np.uint64(feature_seed),
    )
    feature, threshold, left, right, frac, count = arrays
    return DecisionTree(X.shape[1], feature.astype(np.intp), threshold, left.astype(np.intp),
                        right.astype(np.intp), frac, count.astype(np.intp))


def cart_fit(matrix, labels, config: TreeConfig = TreeConfig(), seed: int = 0) -> DecisionTree:
    """Grow one CART tree considering every feature at every node.

    ``seed`` is accepted for interface symmetry with :func:`forest_fit`; a
    tree that searches all features uses no randomness.
    """
    check_seed(seed)
    X, y = _check_xy(matrix, labels)
    return _grow(X, y, config, None)


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[DecisionTree, ...]
    n_cols: int
    mtry: int
    bootstrap: bool
    seed: int

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def __eq__(self, other):
        if not isinstance(other, ForestModel):
            return NotImplemented
        return (self.n_cols, self.mtry, self.bootstrap, self.seed) == (
            other.n_cols, other.mtry, other.bootstrap, other.seed
        ) and self.trees == other.trees

    __hash__ = None

    def scores(self, matrix) -> np.ndarray:
        """Fraction of trees voting positive (leaf fraction >= 0.5) per row."""
        X = as_dense(matrix)
        if X.shape[1] != self.n_cols:
            raise DimensionMismatch(f"matrix has {X.shape[1]} columns, forest expects {self.n_cols}")
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.trees:
            votes += tree.positive_fraction[tree.leaf_index(X)] >= 0.5
        return votes / self.n_trees

    def to_json(self) -> dict:
        return {
            "n_cols": self.n_cols,
            "mtry": self.mtry,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "trees": [t.to_json() for t in self.trees],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ForestModel":
        return cls(
            trees=tuple(DecisionTree.from_json(t) for t in data["trees"]),
            n_cols=int(data["n_cols"]),
            mtry=int(data["mtry"]),
            bootstrap=bool(data["bootstrap"]),
            seed=int(data["seed"]),
        )


def default_mtry(n_cols: int) -> int:
    return max(1, math.isqrt(n_cols))


def forest_fit(matrix, labels, forest_config: ForestConfig = ForestConfig(),
               tree_config: TreeConfig = TreeConfig()) -> ForestModel:
    """Bagged CART trees with ``mtry`` candidate features per split.

    Tree ``t`` draws its bootstrap sample from a generator seeded with
    ``derive(seed, t)`` and its per-node feature subsets from a stream seeded
    with ``derive(derive(seed, t), "mtry")``, so each tree is reproducible on
    its own.
    """
    X, y = _check_xy(matrix, labels)
    n, n_cols = X.shape
    mtry = default_mtry(n_cols) if forest_config.mtry is None else forest_config.mtry
    if mtry > n_cols:
        raise MtryTooLarge(f"mtry={mtry} exceeds the {n_cols} available features")
    trees = []
    for t in range(forest_config.n_trees):
        tree_seed = derive(forest_config.seed, t)
        rng = rng_for(tree_seed)
        sample = rng.integers(0, n, size=n) if forest_config.bootstrap else np.arange(n)
        trees.append(_grow(X[sample], y[sample], tree_config, mtry, derive(tree_seed, "mtry")))
    return ForestModel(tuple(trees), n_cols, mtry, forest_config.bootstrap, forest_config.seed)


def predict_score(model: DecisionTree | ForestModel, row) -> float:
    """Score one row: leaf positive fraction for a tree, vote fraction for a forest."""
    x = as_dense_row(row, model.n_cols)
    return float(model.scores(x[None, :])[0])


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(tree: DecisionTree, vocab: Vocabulary | Sequence[str]) -> str:
    """Graphviz source for ``tree`` with vocabulary terms as split labels."""
    terms = vocab.terms if isinstance(vocab, Vocabulary) else tuple(vocab)
    internal = tree.feature[tree.feature != LEAF]
    if internal.size and int(internal.max()) >= len(terms):
        raise VocabMismatch(
            f"tree splits on feature {int(internal.max())} but vocabulary has {len(terms)} terms"
        )
    lines = [
        "digraph Tree {",
        'node [shape=box, style="rounded", fontname="helvetica"] ;',
        'edge [fontname="helvetica"] ;',
    ]
    for i in range(tree.n_nodes):
        if tree.is_leaf(i):
            frac = float(tree.positive_fraction[i])
            cls = "Positive" if frac >= 0.5 else "Negative"
            label = f"{cls}\\npositive_fraction = {frac:.3f}\\nsamples = {int(tree.sample_count[i])}"
        else:
            term = _dot_escape(terms[tree.feature[i]])
            label = f"{term} < {float(tree.threshold[i]):g}"
        lines.append(f'{i} [label="{label}"] ;')
    for i in range(tree.n_nodes):
        if not tree.is_leaf(i):
            lines.append(f'{i} -> {tree.left[i]} [label="yes"] ;')
            lines.append(f'{i} -> {tree.right[i]} [label="no"] ;')
    lines.append("}")
    return "\n".join(lines) + "\n"
