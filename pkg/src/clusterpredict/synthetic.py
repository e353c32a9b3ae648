"""Seeded two-topic corpus of short product tweets.

Documents are about either the device itself or the retail/support
experience. Sentiment words are topic-specific, a few words flip polarity
between topics ("cheap" build vs. "cheap" price), and "freak" is a strong,
topic-independent negative cue. Labels carry a small amount of noise so no
model can be perfect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus_io import Label, LabeledDocument
from .seeding import rng_for

FILLER = (
    "apple today new just got really day time people know think want need see "
    "going still week morning guys finally anyone else"
).split()
STOP = "the my is a to and it of this for with so i".split()

TOPICS = (
    {
        "words": ("iphone screen camera battery charger update ios app photos display "
                  "keyboard touch design speaker storage case pixel sensor").split(),
        "positive": "amazing sleek crisp gorgeous smooth snappy long".split(),
        "negative": "crashes laggy dies cracked overheats glitchy cheap".split(),
    },
    {
        "words": ("store service support genius staff line order delivery refund price "
                  "appointment manager shipping customer counter receipt warranty").split(),
        "positive": "helpful friendly quick polite easy cheap refunded".split(),
        "negative": "rude slow ignored overpriced scam long useless".split(),
    },
)
SHARED_POSITIVE = "love great happy best".split()
SHARED_NEGATIVE = "hate awful worst sucks".split()
DOMINANT_NEGATIVE = "freak"


@dataclass(frozen=True)
class CorpusConfig:
    n_docs: int = 1200
    positive_rate: float = 0.46
    label_noise: float = 0.05
    freak_rate_negative: float = 0.35
    freak_rate_positive: float = 0.03
    cue_fidelity: float = 0.8


def generate_corpus(seed: int, config: CorpusConfig = CorpusConfig()) -> list[LabeledDocument]:
    rng = rng_for(seed)
    docs = []
    for i in range(config.n_docs):
        topic = TOPICS[int(rng.integers(2))]
        positive = rng.random() < config.positive_rate
        words = list(rng.choice(topic["words"], size=int(rng.integers(2, 6))))
        words += list(rng.choice(FILLER, size=int(rng.integers(1, 4))))
        words += list(rng.choice(STOP, size=int(rng.integers(1, 4))))
        for _ in range(int(rng.integers(1, 3))):
            sentiment = positive if rng.random() < config.cue_fidelity else not positive
            pool = topic["positive" if sentiment else "negative"]
            if rng.random() < 0.25:
                pool = SHARED_POSITIVE if sentiment else SHARED_NEGATIVE
            words.append(str(rng.choice(pool)))
        freak_rate = config.freak_rate_positive if positive else config.freak_rate_negative
        if rng.random() < freak_rate:
            words.append(DOMINANT_NEGATIVE)
        rng.shuffle(words)
        text = " ".join(words)
        roll = rng.random()
        if roll < 0.15:
            text = "@AppleSupport " + text
        elif roll < 0.25:
            text = text + " https://t.co/" + "".join(rng.choice(list("abcdefgh123"), size=6))
        if rng.random() < config.label_noise:
            positive = not positive
        docs.append(LabeledDocument(i, text, Label.POSITIVE if positive else Label.NEGATIVE))
    return docs
