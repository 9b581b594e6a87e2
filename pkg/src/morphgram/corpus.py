"""Corpus ingestion: tokenization, vocabulary construction, subsampling."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def tokenize(text: str) -> list[str]:
    """Split text into maximal runs of non-whitespace characters.

    No case folding, no punctuation stripping; repeated separators collapse.
    """
    return text.split()


def read_text(path: str | Path) -> str:
    """Read a UTF-8 text file, reporting the byte offset of any invalid data."""
    raw = Path(path).read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc


def iter_token_lines(paths: Sequence[str | Path]) -> Iterator[list[str]]:
    """Yield token lists per non-empty line, files read in argument order.

    Lines are independent token sequences: training context windows never
    cross a newline.
    """
    for path in paths:
        for line in read_text(path).splitlines():
            tokens = tokenize(line)
            if tokens:
                yield tokens


@dataclass
class Vocabulary:
    """Token <-> dense-id mapping with frequency counts.

    Words are sorted by descending count, ties broken by first occurrence in
    the stream; ids are dense 0..n-1.
    """

    words: list[str]
    counts: np.ndarray  # int64, parallel to words
    index: dict[str, int]
    total_tokens: int

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        try:
            return self.index[word]
        except KeyError:
            raise KeyError(f"word not in vocabulary: {word!r}") from None

    @classmethod
    def from_items(cls, items: Sequence[tuple[str, int]]) -> "Vocabulary":
        words = [w for w, _ in items]
        counts = np.array([c for _, c in items], dtype=np.int64)
        index = {w: i for i, w in enumerate(words)}
        return cls(words=words, counts=counts, index=index,
                   total_tokens=int(counts.sum()) if len(words) else 0)

    def save(self, path: str | Path) -> None:
        """Dump as one ``word<TAB>count`` line per entry, descending count."""
        with open(path, "w", encoding="utf-8") as fh:
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word}\t{int(count)}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        items = []
        for lineno, line in enumerate(read_text(path).splitlines(), start=1):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count'")
            items.append((parts[0], int(parts[1])))
        return cls.from_items(items)


@dataclass
class CorpusStats:
    raw_token_count: int
    retained_token_count: int
    distinct_before_cap: int


def build_vocab(tokens: Iterable[str], min_count: int = 5,
                max_vocab: int = 100_000) -> Vocabulary:
    """Build a frequency-capped vocabulary from a token stream.

    Words below ``min_count`` are dropped first, then only the ``max_vocab``
    most frequent survive. An empty stream yields an empty vocabulary.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    if max_vocab < 1:
        raise ValueError(f"max_vocab must be >= 1, got {max_vocab}")
    counter: Counter[str] = Counter()
    for token in tokens:
        counter[token] += 1
    return _vocab_from_counter(counter, min_count, max_vocab)


def _vocab_from_counter(counter: Counter, min_count: int,
                        max_vocab: int) -> Vocabulary:
    # Counter preserves first-occurrence order, so a stable sort on -count
    # realizes the first-occurrence tie-break.
    items = [(w, c) for w, c in counter.items() if c >= min_count]
    if counter and not items:
        logger.warning("no tokens survived min_count=%d; vocabulary is empty",
                       min_count)
    items.sort(key=lambda wc: -wc[1])
    return Vocabulary.from_items(items[:max_vocab])


def load_corpus(paths: Sequence[str | Path], min_count: int = 5,
                max_vocab: int = 100_000) -> tuple[Vocabulary, CorpusStats]:
    """Scan corpus files once and build the vocabulary plus ingest stats."""
    counter: Counter[str] = Counter()
    raw = 0
    for tokens in iter_token_lines(paths):
        raw += len(tokens)
        counter.update(tokens)
    vocab = _vocab_from_counter(counter, min_count, max_vocab)
    stats = CorpusStats(raw_token_count=raw,
                        retained_token_count=vocab.total_tokens,
                        distinct_before_cap=len(counter))
    return vocab, stats


def lines_to_ids(paths: Sequence[str | Path],
                 vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    """Map corpus lines to vocabulary ids in CSR form.

    Returns ``(tokens, offsets)`` where line ``l`` occupies
    ``tokens[offsets[l]:offsets[l+1]]``. Out-of-vocabulary tokens are
    dropped; lines left empty are skipped.
    """
    flat: list[int] = []
    offsets = [0]
    index = vocab.index
    for tokens in iter_token_lines(paths):
        ids = [index[t] for t in tokens if t in index]
        if ids:
            flat.extend(ids)
            offsets.append(len(flat))
    return (np.asarray(flat, dtype=np.int32),
            np.asarray(offsets, dtype=np.int64))


def keep_probability(word_freq: int, total: int, threshold: float) -> float:
    """Probability of keeping a word occurrence under frequency subsampling.

    ``min(1, sqrt(t/f) + t/f)`` with ``f = word_freq / total``.
    """
    if not 0 < word_freq <= total:
        raise ValueError(f"need 0 < word_freq <= total, got {word_freq}/{total}")
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    f = word_freq / total
    return min(1.0, (threshold / f) ** 0.5 + threshold / f)


def keep_probabilities(vocab: Vocabulary, threshold: float) -> np.ndarray:
    """Vectorized :func:`keep_probability` over a whole vocabulary."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if len(vocab) == 0:
        return np.zeros(0, dtype=np.float64)
    f = vocab.counts.astype(np.float64) / float(vocab.total_tokens)
    return np.minimum(1.0, np.sqrt(threshold / f) + threshold / f)
