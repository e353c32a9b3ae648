import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterpredict.errors import ConfigError, EmptyVocabulary
from clusterpredict.featurizer import (
    FeatureMatrix,
    TokenizerConfig,
    Vocabulary,
    build_vocabulary,
    min_doc_count,
    tokenize,
    vectorize,
)

from conftest import docs_from

RAW = TokenizerConfig(remove_stopwords=False, min_token_length=1)


@pytest.mark.parametrize("text, expected", [
    ("I love @Apple! http://t.co/x", ["love"]),
    ("Freak FREAK freak", ["freak", "freak", "freak"]),
    ("", []),
    ("www.apple.com rocks", ["rocks"]),
    ("battery_life is 10hrs", ["battery", "life", "10hrs"]),
    ("RT @user: so good!!", ["good"]),
])
def test_tokenize_defaults(text, expected):
    assert tokenize(text) == expected


def test_tokenize_switches():
    text = "Hi @bob see https://x.io NOW"
    cfg = TokenizerConfig(lowercase=False, strip_urls=False, strip_mentions=False,
                          remove_stopwords=False, min_token_length=1)
    assert tokenize(text, cfg) == ["Hi", "bob", "see", "https", "x", "io", "NOW"]


def test_tokenize_custom_stopwords_and_stemmer():
    cfg = TokenizerConfig(stopword_list=frozenset({"phone"}), stemmer=lambda t: t.rstrip("s"))
    assert tokenize("phones phone cameras", cfg) == ["phone", "camera"]


def test_min_token_length_validated():
    with pytest.raises(ConfigError):
        TokenizerConfig(min_token_length=0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.text("abcdefghijklmnopqrstuvwxyzABCDEFG", min_size=1, max_size=8), max_size=12))
def test_tokenize_idempotent_on_alphabetic_tokens(words):
    tokens = tokenize(" ".join(words))
    assert tokenize(" ".join(tokens)) == tokens


def test_vocabulary_hand_counted():
    vocab = build_vocabulary(docs_from([("a b", 0), ("a c", 1), ("a", 0)]), RAW, 0.5)
    assert vocab.terms == ("a",)
    assert vocab.doc_frequency == {"a": 3}


def test_vocabulary_fraction_zero_keeps_everything():
    vocab = build_vocabulary(docs_from([("b a", 0), ("c a", 1), ("d", 0)]), RAW, 0.0)
    assert vocab.terms == ("a", "b", "c", "d")
    assert vocab.index == {"a": 0, "b": 1, "c": 2, "d": 3}


def test_vocabulary_fraction_one_without_common_term():
    with pytest.raises(EmptyVocabulary):
        build_vocabulary(docs_from([("a", 0), ("b", 1)]), RAW, 1.0)


def test_min_doc_count_is_exact_ceiling():
    assert min_doc_count(0.5, 3) == 2
    assert min_doc_count(0.005, 1200) == 6
    assert min_doc_count(0.005, 840) == 5
    # 0.1 * 30 is 3.0000000000000004 in binary floating point
    assert min_doc_count(0.1, 30) == 3


def test_vectorize_counts():
    vocab = Vocabulary(("a", "b", "c"), {}, 0.0, 0)
    m = vectorize(docs_from([("a a b", 1), ("zzz qqq", 0)]), vocab, RAW)
    assert m.rows == (((0, 2), (1, 1)), ())
    assert m.n_cols == 3 and m.n_rows == 2
    assert m.row_ids == (0, 1)


def test_vectorize_binary_switch():
    vocab = Vocabulary(("a", "b"), {}, 0.0, 0)
    m = vectorize(docs_from([("a a b", 1)]), vocab, RAW, binary=True)
    assert m.rows == (((0, 1), (1, 1)),)


def test_test_docs_never_grow_columns(tiny_docs):
    vocab = build_vocabulary(tiny_docs[:3], min_doc_fraction=0.0)
    m = vectorize(tiny_docs[3:], vocab)
    assert m.n_cols == len(vocab)


def test_feature_matrix_rejects_bad_rows():
    with pytest.raises(ValueError):
        FeatureMatrix(3, (((1, 1), (0, 2)),), (0,))
    with pytest.raises(ValueError):
        FeatureMatrix(3, (((0, 0),),), (0,))
    with pytest.raises(ValueError):
        FeatureMatrix(3, (((3, 1),),), (0,))


def test_triplet_export(tmp_path):
    m = FeatureMatrix(3, (((0, 2), (2, 1)), ()), (5, 6))
    path = tmp_path / "m.csv"
    m.write_triplets(path)
    assert path.read_text() == "row,col,count\n0,0,2\n0,2,1\n"


def test_vocabulary_file_round_trip(tmp_path, tiny_docs):
    vocab = build_vocabulary(tiny_docs, min_doc_fraction=0.0)
    vocab.save(tmp_path / "v.txt")
    assert Vocabulary.load(tmp_path / "v.txt").terms == vocab.terms


words = st.sampled_from(["aa", "bb", "cc", "dd", "ee"])
corpora = st.lists(st.lists(words, min_size=0, max_size=6), min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(corpora, st.floats(0.0, 1.0))
def test_column_sums_bound_doc_frequency(corpus, fraction):
    docs = docs_from([(" ".join(ws), 0) for ws in corpus])
    try:
        vocab = build_vocabulary(docs, RAW, fraction)
    except EmptyVocabulary:
        return
    dense = vectorize(docs, vocab, RAW).to_dense()
    cutoff = min_doc_count(fraction, len(docs))
    for j, term in enumerate(vocab.terms):
        # brute-force recount straight from the word lists
        df = sum(term in ws for ws in corpus)
        total = sum(ws.count(term) for ws in corpus)
        repeats = any(ws.count(term) > 1 for ws in corpus)
        assert vocab.doc_frequency[term] == df >= cutoff
        assert dense[:, j].sum() == total >= df
        assert (total == df) == (not repeats)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_dense_sparse_round_trip(n, d, seed):
    r = np.random.default_rng(seed)
    dense = r.integers(0, 3, size=(n, d)) * (r.random((n, d)) < 0.5)
    m = FeatureMatrix.from_dense(dense)
    assert np.array_equal(m.to_dense(), dense)
    assert FeatureMatrix.from_dense(m.to_dense()) == m
