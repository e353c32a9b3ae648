import json

import numpy as np
import pydot
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterpredict.errors import ConfigError, EmptyCounts, MtryTooLarge, ShapeMismatch, VocabMismatch
from clusterpredict.trees import (
    DecisionTree,
    ForestConfig,
    ForestModel,
    Leaf,
    Split,
    TreeConfig,
    cart_fit,
    default_mtry,
    export_dot,
    forest_fit,
    gini,
    predict_score,
)


def naive_cart(X, y, rows, depth, cfg):
    """Plain recursive CART: every feature, every midpoint, strict improvement wins."""
    m = len(rows)
    n_pos = int(y[rows].sum())
    leaf = Leaf(n_pos / m, m)
    if n_pos in (0, m):
        return leaf
    if cfg.max_depth is not None and depth >= cfg.max_depth:
        return leaf
    if m < cfg.min_samples_split or m < 2 * cfg.min_samples_leaf:
        return leaf
    best = None
    for f in range(X.shape[1]):
        values = sorted(set(X[rows, f].tolist()))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2.0
            mask = X[rows, f] < thr
            left, right = rows[mask], rows[~mask]
            if len(left) < cfg.min_samples_leaf or len(right) < cfg.min_samples_leaf:
                continue
            pl, pr = int(y[left].sum()), int(y[right].sum())
            nl, nr = len(left) - pl, len(right) - pr
            score = (pl * pl + nl * nl) / len(left) + (pr * pr + nr * nr) / len(right)
            if best is None or score > best[0]:
                best = (score, f, thr, left, right)
    if best is None:
        return leaf
    score, f, thr, left, right = best
    parent = (n_pos * n_pos + (m - n_pos) ** 2) / m
    if cfg.min_impurity_decrease > 0 and (score - parent) / m < cfg.min_impurity_decrease:
        return leaf
    return Split(f, thr, naive_cart(X, y, left, depth + 1, cfg), naive_cart(X, y, right, depth + 1, cfg))


def node_decreases(tree):
    """Gini decrease at every internal node, recomputed from the stored counts."""
    pos = np.rint(tree.positive_fraction * tree.sample_count).astype(int)
    out = []
    for i in range(tree.n_nodes):
        if tree.is_leaf(i):
            continue
        l, r = tree.left[i], tree.right[i]
        n = tree.sample_count[i]
        child = sum(tree.sample_count[c] / n * gini((tree.sample_count[c] - pos[c], pos[c]))
                    for c in (l, r))
        out.append(gini((n - pos[i], pos[i])) - child)
    return out


def test_gini_examples():
    assert gini((5, 5)) == 0.5
    assert gini((0, 7)) == 0.0
    assert gini((6, 2)) == 0.375


def test_gini_rejects_empty():
    with pytest.raises(EmptyCounts):
        gini((0, 0))
    with pytest.raises(EmptyCounts):
        gini((-1, 2))


def test_simple_threshold_beats_every_alternative():
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    y = np.array([0, 0, 1, 1])
    tree = cart_fit(X, y)
    assert tree.root == Split(0, 0.5, Leaf(0.0, 2), Leaf(1.0, 2))
    # exhaustive: every cut position of the sorted rows, weighted child gini
    weighted = []
    for cut in range(1, 4):
        l, r = y[:cut], y[cut:]
        weighted.append(sum(len(s) / 4 * gini((len(s) - s.sum(), s.sum())) for s in (l, r)))
    assert min(weighted) == weighted[1] == 0.0


def test_pure_node_is_a_leaf():
    tree = cart_fit(np.array([[0.0, 1.0], [2.0, 3.0]]), [1, 1])
    assert tree.root == Leaf(1.0, 2)
    assert tree.n_nodes == 1 and tree.depth() == 0


def test_conflicting_duplicates_stay_in_one_leaf():
    X = np.array([[1.0, 2.0]] * 3 + [[0.0, 0.0]])
    tree = cart_fit(X, [1, 0, 1, 0])
    assert tree.root == Split(0, 0.5, Leaf(0.0, 1), Leaf(2 / 3, 3))


def test_zero_gain_split_still_separates_xor():
    # no single split lowers Gini on XOR, yet the tree must fit it
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    tree = cart_fit(X, y)
    assert np.array_equal(tree.scores(X), y)
    assert node_decreases(tree)[0] == 0.0


def test_min_impurity_decrease_blocks_weak_splits():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    tree = cart_fit(X, [0, 1, 1, 0], TreeConfig(min_impurity_decrease=1e-9))
    assert tree.root == Leaf(0.5, 4)


def test_max_depth_zero_is_a_stump_leaf():
    tree = cart_fit(np.array([[0.0], [1.0]]), [0, 1], TreeConfig(max_depth=0))
    assert tree.root == Leaf(0.5, 2)


def test_config_validation():
    with pytest.raises(ConfigError):
        TreeConfig(min_samples_split=1)
    with pytest.raises(ConfigError):
        TreeConfig(min_samples_leaf=0)
    with pytest.raises(ConfigError):
        ForestConfig(n_trees=0)


def test_shape_checks():
    with pytest.raises(ShapeMismatch):
        cart_fit(np.zeros((3, 2)), [0, 1])


configs = st.builds(
    TreeConfig,
    max_depth=st.one_of(st.none(), st.integers(0, 4)),
    min_samples_split=st.integers(2, 5),
    min_samples_leaf=st.integers(1, 3),
    min_impurity_decrease=st.sampled_from([0.0, 0.0, 0.01, 0.05]),
)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 25), st.integers(1, 5), st.integers(0, 2**32 - 1), configs)
def test_matches_naive_recursive_cart(n, p, seed, cfg):
    r = np.random.default_rng(seed)
    X = r.integers(0, 3, size=(n, p)).astype(float)
    y = r.integers(0, 2, size=n)
    tree = cart_fit(X, y, cfg)
    assert tree.root == naive_cart(X, y, np.arange(n), 0, cfg)
    for dec in node_decreases(tree):
        assert dec >= cfg.min_impurity_decrease - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_row_order_does_not_matter(n, p, seed):
    r = np.random.default_rng(seed)
    X = r.integers(0, 4, size=(n, p)).astype(float)
    y = r.integers(0, 2, size=n)
    perm = r.permutation(n)
    assert cart_fit(X, y) == cart_fit(X[perm], y[perm])


def test_forest_determinism_and_vote_grid(rng):
    X = rng.integers(0, 3, size=(60, 9)).astype(float)
    y = rng.integers(0, 2, size=60)
    cfg = ForestConfig(n_trees=7, seed=42)
    a, b = forest_fit(X, y, cfg), forest_fit(X, y, cfg)
    assert a == b
    assert a.mtry == default_mtry(9) == 3
    votes = a.scores(X) * 7
    assert np.allclose(votes, np.round(votes))
    assert forest_fit(X, y, ForestConfig(n_trees=7, seed=43)) != a


def test_forest_tree_is_reproducible_alone(rng):
    X = rng.integers(0, 3, size=(40, 6)).astype(float)
    y = rng.integers(0, 2, size=40)
    five = forest_fit(X, y, ForestConfig(n_trees=5, seed=3))
    three = forest_fit(X, y, ForestConfig(n_trees=3, seed=3))
    assert five.trees[:3] == three.trees


def test_single_full_forest_tree_is_cart(rng):
    X = rng.integers(0, 3, size=(40, 6)).astype(float)
    y = rng.integers(0, 2, size=40)
    forest = forest_fit(X, y, ForestConfig(n_trees=1, mtry=6, bootstrap=False, seed=9))
    assert forest.trees[0] == cart_fit(X, y)


def test_mtry_too_large():
    with pytest.raises(MtryTooLarge):
        forest_fit(np.zeros((4, 2)), [0, 1, 0, 1], ForestConfig(n_trees=1, mtry=3))


def test_predict_score_single_row():
    X = np.array([[0.0], [0.0], [1.0], [1.0]])
    tree = cart_fit(X, [0, 0, 1, 1])
    assert predict_score(tree, [1.0]) == 1.0
    assert predict_score(tree, ()) == 0.0
    forest = forest_fit(X, [0, 0, 1, 1], ForestConfig(n_trees=4, mtry=1, bootstrap=False))
    assert predict_score(forest, [[0, 1.0]]) == 1.0


def test_json_round_trips(rng):
    X = rng.integers(0, 3, size=(30, 4)).astype(float)
    y = rng.integers(0, 2, size=30)
    tree = cart_fit(X, y)
    assert DecisionTree.from_json(json.loads(json.dumps(tree.to_json()))) == tree
    forest = forest_fit(X, y, ForestConfig(n_trees=3))
    again = ForestModel.from_json(json.loads(json.dumps(forest.to_json())))
    assert again == forest
    assert np.array_equal(again.scores(X), forest.scores(X))


def test_dot_single_leaf():
    tree = cart_fit(np.array([[1.0]]), [0])
    dot = export_dot(tree, ["freak"])
    graph = pydot.graph_from_dot_data(dot)[0]
    nodes = [n for n in graph.get_nodes() if n.get_name() not in ("node", "edge")]
    assert len(nodes) == 1
    assert "Negative" in nodes[0].get_label()
    assert graph.get_edges() == []


def test_dot_depth_one_uses_terms():
    X = np.array([[0.0, 2.0], [1.0, 2.0], [0.0, 1.0], [3.0, 1.0]])
    tree = cart_fit(X, [1, 0, 1, 0])
    graph = pydot.graph_from_dot_data(export_dot(tree, ["freak", "love"]))[0]
    labels = {n.get_name(): n.get_label().strip('"') for n in graph.get_nodes()
              if n.get_name() not in ("node", "edge")}
    assert labels["0"] == "freak < 0.5"
    edges = {(e.get_source(), e.get_destination()): e.get_label().strip('"') for e in graph.get_edges()}
    assert edges == {("0", "1"): "yes", ("0", "2"): "no"}
    assert labels["1"].startswith("Positive") and labels["2"].startswith("Negative")


def test_dot_rejects_short_vocabulary():
    tree = cart_fit(np.array([[0.0, 0.0], [0.0, 1.0]]), [0, 1])
    with pytest.raises(VocabMismatch):
        export_dot(tree, ["only"])


def test_dot_escapes_quotes():
    tree = cart_fit(np.array([[0.0], [1.0]]), [0, 1])
    graph = pydot.graph_from_dot_data(export_dot(tree, ['say "hi"']))[0]
    assert len(graph.get_edges()) == 2
