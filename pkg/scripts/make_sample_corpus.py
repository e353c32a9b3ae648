"""Regenerate the bundled sample corpus (200 synthetic labeled tweets).

    python scripts/make_sample_corpus.py [--seed 7] [--n 200]
"""

import argparse
import dataclasses
from pathlib import Path

from clusterpredict.corpus_io import write_csv
from clusterpredict.synthetic import CorpusConfig, generate_corpus

TARGET = Path(__file__).resolve().parents[1] / "src" / "clusterpredict" / "data" / "sample_corpus.csv"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--out", type=Path, default=TARGET)
    args = parser.parse_args()
    docs = generate_corpus(args.seed, dataclasses.replace(CorpusConfig(), n_docs=args.n))
    write_csv(docs, args.out)
    print(f"wrote {len(docs)} documents to {args.out}")


if __name__ == "__main__":
    main()
