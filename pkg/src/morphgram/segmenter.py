"""Word-to-subword segmentation: whole word, hashed char n-grams, morphemes.

Every strategy maps a vocabulary word to a set of row indices into the input
embedding matrix. Row ``0..V-1`` is always the word's own row; extra rows
(hash buckets or morpheme ids) start at offset ``V``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .corpus import Vocabulary, read_text

logger = logging.getLogger(__name__)

FNV_OFFSET_BASIS = 2166136261
FNV_PRIME = 16777619


def fnv1a_32(data: bytes) -> int:
    """FNV-1a 32-bit hash with wrapping multiply."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFF
    return h


def hash_subword(unit: str, bucket_count: int) -> int:
    """Bucket index of a subword unit: FNV-1a over UTF-8 bytes, mod buckets."""
    if bucket_count < 1:
        raise ValueError(f"bucket_count must be >= 1, got {bucket_count}")
    return fnv1a_32(unit.encode("utf-8")) % bucket_count


def char_ngrams(word: str, n_min: int, n_max: int) -> list[str]:
    """All n-grams of the ``<word>``-wrapped form, shortest first.

    Operates on Unicode code points. Grams of each length appear left to
    right; duplicate substrings are kept (each occurrence contributes).
    """
    if not word:
        raise ValueError("word must be non-empty")
    wrapped = f"<{word}>"
    grams = []
    for n in range(n_min, n_max + 1):
        for i in range(len(wrapped) - n + 1):
            grams.append(wrapped[i:i + n])
    return grams


@dataclass(frozen=True)
class WholeWord:
    """Identity strategy: a word is represented by its own row only."""


@dataclass(frozen=True)
class CharNgrams:
    """Hashed character n-gram strategy."""

    n_min: int = 3
    n_max: int = 6
    bucket_count: int = 2_000_000

    def __post_init__(self) -> None:
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(
                f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.bucket_count < 1:
            raise ValueError(f"bucket_count must be >= 1, got {self.bucket_count}")


@dataclass
class MorphLexicon:
    """Morpheme-lexicon strategy with a dedicated row per morpheme.

    The morpheme inventory is closed and small, so morphemes are not hashed:
    ids are assigned by first appearance while scanning lexicon entries in
    file order (after duplicate-word lines resolve to the last one).
    """

    lexicon: dict[str, list[str]] = field(default_factory=dict)
    morphemes: list[str] = field(init=False)
    morph_index: dict[str, int] = field(init=False)
    word_morph_ids: dict[str, list[int]] = field(init=False)

    def __post_init__(self) -> None:
        self.morphemes = []
        self.morph_index = {}
        self.word_morph_ids = {}
        for word, morphs in self.lexicon.items():
            if not morphs:
                raise ValueError(f"lexicon entry {word!r} has no morphemes")
            ids: list[int] = []
            for morph in morphs:
                mid = self.morph_index.get(morph)
                if mid is None:
                    mid = len(self.morphemes)
                    self.morph_index[morph] = mid
                    self.morphemes.append(morph)
                if mid not in ids:  # de-duplicate within one word
                    ids.append(mid)
            self.word_morph_ids[word] = ids


SegmentationStrategy = Union[WholeWord, CharNgrams, MorphLexicon]


def load_lexicon(path: str | Path) -> dict[str, list[str]]:
    """Parse a morpheme lexicon TSV: ``word<TAB>morph1 morph2 ...``.

    Malformed lines are reported with their line number and skipped;
    duplicate word lines resolve to the last occurrence.
    """
    lexicon: dict[str, list[str]] = {}
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        word, sep, rest = line.partition("\t")
        morphs = rest.split()
        if not sep or not word or not morphs:
            logger.warning("%s:%d: skipping malformed lexicon line", path, lineno)
            continue
        if word in lexicon:
            del lexicon[word]  # last occurrence wins, including its position
        lexicon[word] = morphs
    return lexicon


@dataclass
class SubwordSet:
    """Input-matrix rows for one word, with readable unit labels."""

    indices: list[int]
    display: list[str]


def extra_rows(strategy: SegmentationStrategy) -> int:
    """Input-matrix rows required beyond the vocabulary rows."""
    if isinstance(strategy, WholeWord):
        return 0
    if isinstance(strategy, CharNgrams):
        return strategy.bucket_count
    if isinstance(strategy, MorphLexicon):
        return len(strategy.morphemes)
    raise TypeError(f"unknown strategy: {strategy!r}")


def segment(word: str, strategy: SegmentationStrategy,
            vocab: Vocabulary) -> SubwordSet:
    """Map an in-vocabulary word to its subword row set.

    The word's own row is always included. A word missing from a morpheme
    lexicon falls back to its own row alone.
    """
    wid = vocab.id_of(word)
    if isinstance(strategy, WholeWord):
        return SubwordSet([wid], [word])
    base = len(vocab)
    if isinstance(strategy, CharNgrams):
        grams = char_ngrams(word, strategy.n_min, strategy.n_max)
        indices = [wid] + [base + hash_subword(g, strategy.bucket_count)
                           for g in grams]
        return SubwordSet(indices, [word] + grams)
    if isinstance(strategy, MorphLexicon):
        ids = strategy.word_morph_ids.get(word)
        if not ids:
            return SubwordSet([wid], [word])
        return SubwordSet([wid] + [base + mid for mid in ids],
                          [word] + [strategy.morphemes[mid] for mid in ids])
    raise TypeError(f"unknown strategy: {strategy!r}")


def subword_csr(vocab: Vocabulary,
                strategy: SegmentationStrategy) -> tuple[np.ndarray, np.ndarray]:
    """Precompute ``segment`` for every vocabulary word in CSR form.

    Returns ``(flat, offsets)`` with word ``w``'s rows at
    ``flat[offsets[w]:offsets[w+1]]``.
    """
    flat: list[int] = []
    offsets = np.zeros(len(vocab) + 1, dtype=np.int64)
    for wid, word in enumerate(vocab.words):
        flat.extend(segment(word, strategy, vocab).indices)
        offsets[wid + 1] = len(flat)
    return np.asarray(flat, dtype=np.int32), offsets


def strategy_to_descriptor(strategy: SegmentationStrategy) -> dict:
    """JSON-serializable description, exact enough to rebuild the strategy."""
    if isinstance(strategy, WholeWord):
        return {"kind": "whole"}
    if isinstance(strategy, CharNgrams):
        return {"kind": "char_ngrams", "n_min": strategy.n_min,
                "n_max": strategy.n_max, "bucket_count": strategy.bucket_count}
    if isinstance(strategy, MorphLexicon):
        return {"kind": "morph_lexicon",
                "lexicon": {w: [strategy.morphemes[i] for i in ids]
                            for w, ids in strategy.word_morph_ids.items()}}
    raise TypeError(f"unknown strategy: {strategy!r}")


def strategy_from_descriptor(descriptor: dict) -> SegmentationStrategy:
    kind = descriptor.get("kind")
    if kind == "whole":
        return WholeWord()
    if kind == "char_ngrams":
        return CharNgrams(n_min=descriptor["n_min"], n_max=descriptor["n_max"],
                          bucket_count=descriptor["bucket_count"])
    if kind == "morph_lexicon":
        return MorphLexicon(lexicon=dict(descriptor["lexicon"]))
    raise ValueError(f"unknown strategy kind: {kind!r}")
