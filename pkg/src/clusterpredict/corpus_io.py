"""Labeled CSV corpora and deterministic train/test splits."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    BadLabel,
    ConfigError,
    EmptyCorpus,
    EmptyText,
    MalformedCsv,
    MissingColumn,
    TooFewDocuments,
)
from .seeding import check_seed, rng_for


class Label(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1

    def __str__(self):
        return self.name.capitalize()


@dataclass(frozen=True)
class LabeledDocument:
    id: int
    text: str
    label: Label


DEFAULT_LABEL_STRINGS: Mapping[str, Label] = {
    "negative": Label.NEGATIVE,
    "positive": Label.POSITIVE,
    "neg": Label.NEGATIVE,
    "pos": Label.POSITIVE,
}


@dataclass(frozen=True)
class StringLabelRule:
    """Map literal label strings (case-insensitive, stripped) to labels."""

    mapping: Mapping[str, Label] = field(default_factory=lambda: dict(DEFAULT_LABEL_STRINGS))

    def __call__(self, value: str) -> Label:
        try:
            return self.mapping[value.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown label {value!r}") from None


@dataclass(frozen=True)
class ThresholdLabelRule:
    """Numeric scores: Negative iff ``score <= threshold``."""

    threshold: float = 0.0

    def __call__(self, value: str) -> Label:
        try:
            score = float(value)
        except ValueError:
            raise ValueError(f"label {value!r} is not numeric") from None
        if score != score:
            raise ValueError("label is NaN")
        return Label.NEGATIVE if score <= self.threshold else Label.POSITIVE


LabelRule = StringLabelRule | ThresholdLabelRule


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        check_seed(self.seed)


def load_csv(
    path: str | Path,
    text_column: str = "text",
    label_column: str = "label",
    label_rule: LabelRule | None = None,
) -> list[LabeledDocument]:
    """Read one document per data row, ids assigned 0..n-1 in file order.

    The file must be UTF-8 with a header row and RFC 4180 quoting. Blank
    lines are skipped; rows whose text is empty (after stripping) are
    rejected, with every offending line number reported at once.
    """
    rule = label_rule if label_rule is not None else StringLabelRule()
    docs: list[LabeledDocument] = []
    empty_lines: list[int] = []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, strict=True)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyCorpus(f"{path}: file is empty (no header row)") from None
            for name in (text_column, label_column):
                if name not in header:
                    raise MissingColumn(f"{path}: column {name!r} not in header {header}")
            ti, li = header.index(text_column), header.index(label_column)
            for row in reader:
                if not row:
                    continue
                line = reader.line_num
                if len(row) != len(header):
                    raise MalformedCsv(
                        f"{path}: line {line} has {len(row)} fields, header has {len(header)}"
                    )
                text = row[ti]
                if not text.strip():
                    empty_lines.append(line)
                    continue
                try:
                    label = rule(row[li])
                except ValueError as exc:
                    raise BadLabel(f"{path}: line {line}: {exc}") from None
                docs.append(LabeledDocument(len(docs), text, label))
    except csv.Error as exc:
        raise MalformedCsv(f"{path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise MalformedCsv(f"{path}: not valid UTF-8 ({exc.reason})") from None

    if empty_lines:
        raise EmptyText(f"{path}: empty text on line(s) {', '.join(map(str, empty_lines))}")
    if not docs:
        raise EmptyCorpus(f"{path}: no data rows")
    return docs


def train_size(n: int, train_fraction: float) -> int:
    """``round(n * train_fraction)`` with halves rounded up, in exact decimal."""
    exact = Decimal(n) * Decimal(repr(train_fraction))
    return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def split_train_test(
    docs: Sequence[LabeledDocument], spec: SplitSpec = SplitSpec()
) -> tuple[list[LabeledDocument], list[LabeledDocument]]:
    """Seeded permutation split; the first ``train_size`` permuted docs train."""
    n = len(docs)
    n_train = train_size(n, spec.train_fraction)
    if n < 2 or n_train == 0 or n_train == n:
        raise TooFewDocuments(
            f"{n} documents with train_fraction {spec.train_fraction} leaves an empty side"
        )
    order = rng_for(spec.seed).permutation(n)
    train = [docs[i] for i in order[:n_train]]
    test = [docs[i] for i in order[n_train:]]
    return train, test


def write_csv(docs: Sequence[LabeledDocument], path: str | Path,
              text_column: str = "text", label_column: str = "label") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([text_column, label_column])
        for doc in docs:
            writer.writerow([doc.text, str(doc.label)])
