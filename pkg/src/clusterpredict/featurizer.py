"""Bag-of-words features: tokenizer, training vocabulary, sparse count rows."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, Decimal
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus_io import LabeledDocument
from .errors import ConfigError, DimensionMismatch, EmptyInput, EmptyVocabulary

ENGLISH_STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can could did do does doing down during
each few for from further had has have having he her here hers herself him
himself his how i if in into is it its itself just me more most my myself no nor
not now of off on once only or other our ours ourselves out over own same she
should so some such than that the their theirs them themselves then there these
they this those through to too under until up very was we were what when where
which while who whom why will with would you your yours yourself yourselves rt
im its ive id youre dont doesnt didnt cant wont isnt arent wasnt
""".split())

_URL = re.compile(r"(?:\b[a-zA-Z][a-zA-Z0-9+.\-]*://|\bwww\.)\S*")
_MENTION = re.compile(r"@\w+")
_WORD = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_urls: bool = True
    strip_mentions: bool = True
    remove_stopwords: bool = True
    stopword_list: frozenset[str] = ENGLISH_STOPWORDS
    min_token_length: int = 2
    # Optional suffix stripper applied after filtering, e.g. a Porter stemmer.
    stemmer: Callable[[str], str] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ConfigError(f"min_token_length must be >= 1, got {self.min_token_length}")


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Split ``text`` into word tokens, keeping order and duplicates.

    >>> tokenize("I love @Apple! http://t.co/x")
    ['love']
    """
    if config.strip_urls:
        text = _URL.sub(" ", text)
    if config.strip_mentions:
        text = _MENTION.sub(" ", text)
    if config.lowercase:
        text = text.lower()
    tokens = [t for t in _WORD.findall(text) if len(t) >= config.min_token_length]
    if config.remove_stopwords:
        tokens = [t for t in tokens if t not in config.stopword_list]
    if config.stemmer is not None:
        tokens = [config.stemmer(t) for t in tokens]
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_frequency: Mapping[str, int]
    min_doc_fraction: float
    n_train: int
    index: Mapping[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be unique and sorted")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(t + "\n" for t in self.terms), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        """Read a one-term-per-line file; frequencies are not recoverable."""
        terms = tuple(Path(path).read_text(encoding="utf-8").split("\n"))
        terms = tuple(t for t in terms if t)
        return cls(terms, {}, 0.0, 0)


def min_doc_count(min_doc_fraction: float, n_train: int) -> int:
    """``ceil(min_doc_fraction * n_train)`` without binary floating-point drift."""
    exact = Decimal(repr(float(min_doc_fraction))) * n_train
    return int(exact.to_integral_value(rounding=ROUND_CEILING))


def build_vocabulary(
    train_docs: Sequence[LabeledDocument],
    config: TokenizerConfig = TokenizerConfig(),
    min_doc_fraction: float = 0.005,
) -> Vocabulary:
    """Keep the training terms found in at least ``ceil(fraction * n)`` documents."""
    if not train_docs:
        raise EmptyInput("cannot build a vocabulary from zero documents")
    if not 0.0 <= min_doc_fraction <= 1.0:
        raise ConfigError(f"min_doc_fraction must lie in [0, 1], got {min_doc_fraction}")
    df: Counter[str] = Counter()
    for doc in train_docs:
        df.update(set(tokenize(doc.text, config)))
    cutoff = min_doc_count(min_doc_fraction, len(train_docs))
    kept = sorted(t for t, c in df.items() if c >= cutoff)
    if not kept:
        raise EmptyVocabulary(
            f"no term occurs in >= {cutoff} of {len(train_docs)} training documents"
            f" (min_doc_fraction={min_doc_fraction})"
        )
    return Vocabulary(tuple(kept), {t: df[t] for t in kept}, min_doc_fraction, len(train_docs))


SparseRow = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FeatureMatrix:
    """Document-term counts stored as sorted ``(column, count)`` pairs per row."""

    n_cols: int
    rows: tuple[SparseRow, ...]
    row_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != len(self.row_ids):
            raise ValueError("rows and row_ids differ in length")
        for row in self.rows:
            prev = -1
            for col, count in row:
                if not prev < col < self.n_cols or count < 1:
                    raise ValueError(f"invalid sparse entry ({col}, {count})")
                prev = col

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=np.float64)
        for i, row in enumerate(self.rows):
            for col, count in row:
                dense[i, col] = count
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray, row_ids: Iterable[int] | None = None) -> "FeatureMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D array, got shape {dense.shape}")
        if np.any(dense < 0) or np.any(dense != np.round(dense)):
            raise ValueError("counts must be non-negative integers")
        rows = tuple(
            tuple((int(c), int(r[c])) for c in np.flatnonzero(r)) for r in dense
        )
        ids = tuple(range(len(rows))) if row_ids is None else tuple(row_ids)
        return cls(dense.shape[1], rows, ids)

    def subset(self, positions: Sequence[int]) -> "FeatureMatrix":
        return FeatureMatrix(
            self.n_cols,
            tuple(self.rows[p] for p in positions),
            tuple(self.row_ids[p] for p in positions),
        )

    def write_triplets(self, path: str | Path) -> None:
        """Debug export: ``row,col,count`` CSV with one line per stored entry."""
        lines = ["row,col,count"]
        for i, row in enumerate(self.rows):
            lines.extend(f"{i},{c},{n}" for c, n in row)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def vectorize(
    docs: Sequence[LabeledDocument],
    vocab: Vocabulary,
    config: TokenizerConfig = TokenizerConfig(),
    binary: bool = False,
) -> FeatureMatrix:
    """Count vocabulary terms per document; unseen tokens are ignored."""
    if len(vocab) == 0:
        raise EmptyVocabulary("vocabulary is empty")
    rows = []
    for doc in docs:
        counts = Counter(vocab.index[t] for t in tokenize(doc.text, config) if t in vocab.index)
        rows.append(tuple((c, 1 if binary else n) for c, n in sorted(counts.items())))
    return FeatureMatrix(len(vocab), tuple(rows), tuple(d.id for d in docs))


def as_dense(matrix: FeatureMatrix | np.ndarray) -> np.ndarray:
    """Dense float64 view used by the model code."""
    if isinstance(matrix, FeatureMatrix):
        return matrix.to_dense()
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def as_dense_row(row, n_cols: int) -> np.ndarray:
    """Accept a dense vector or a sequence of ``(column, count)`` pairs.

    An empty sequence is read as the all-zero sparse row.
    """
    if isinstance(row, np.ndarray) and row.ndim == 1:
        if row.shape[0] != n_cols:
            raise DimensionMismatch(f"row has {row.shape[0]} columns, model expects {n_cols}")
        return row.astype(np.float64, copy=False)
    row = list(row)
    if not row:
        return np.zeros(n_cols)
    if isinstance(row[0], (tuple, list)):
        dense = np.zeros(n_cols)
        for col, count in row:
            if not 0 <= col < n_cols:
                raise DimensionMismatch(f"column {col} outside [0, {n_cols})")
            dense[col] = count
        return dense
    if len(row) != n_cols:
        raise DimensionMismatch(f"row has {len(row)} columns, model expects {n_cols}")
    return np.asarray(row, dtype=np.float64)
