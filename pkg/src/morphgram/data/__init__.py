"""Bundled desk-scale data files for smoke tests and examples."""

from pathlib import Path

_HERE = Path(__file__).parent


def corpus_path() -> Path:
    return _HERE / "tiny_corpus.txt"


def lexicon_path() -> Path:
    return _HERE / "tiny_lexicon.tsv"


def similarity_path() -> Path:
    return _HERE / "toy_similarity.tsv"


def analogy_path() -> Path:
    return _HERE / "toy_analogy.txt"
