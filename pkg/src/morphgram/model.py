"""Embedding matrices, subword composition, scoring and persistence."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Vocabulary, read_text
from .segmenter import (
    SegmentationStrategy,
    WholeWord,
    extra_rows,
    segment,
    strategy_from_descriptor,
    strategy_to_descriptor,
    subword_csr,
)

CHECKPOINT_MAGIC = b"MGLAB1"


@dataclass
class EmbeddingModel:
    """Input (subword-row) and output (context-word-row) matrices.

    ``input`` has ``len(vocab) + extra_rows(strategy)`` rows; ``output`` has
    one row per vocabulary word. Matrices are float64.
    """

    dim: int
    vocab: Vocabulary
    strategy: SegmentationStrategy
    input: np.ndarray
    output: np.ndarray

    @classmethod
    def create(cls, vocab: Vocabulary, strategy: SegmentationStrategy,
               dim: int = 300, seed: int = 1) -> "EmbeddingModel":
        """Fresh model: input rows uniform in [-1/(2*dim), 1/(2*dim)] from a
        seeded generator, output rows zero."""
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        rows = len(vocab) + extra_rows(strategy)
        rng = np.random.default_rng(seed)
        inp = (rng.random((rows, dim), dtype=np.float64) - 0.5) / dim
        out = np.zeros((len(vocab), dim), dtype=np.float64)
        return cls(dim=dim, vocab=vocab, strategy=strategy, input=inp, output=out)


def compose(word: str, model: EmbeddingModel) -> np.ndarray:
    """Composed word vector: plain sum of the word's subword input rows."""
    rows = segment(word, model.strategy, model.vocab).indices
    return model.input[rows].sum(axis=0)


def score(center: str, context: str, model: EmbeddingModel) -> float:
    """Dot product of the composed center vector with the context output row."""
    return float(np.dot(compose(center, model),
                        model.output[model.vocab.id_of(context)]))


def composed_matrix(model: EmbeddingModel) -> np.ndarray:
    """Composed vectors for the whole vocabulary, one row per word id.

    Row w equals ``compose(words[w], model)`` exactly (same reduction).
    """
    flat, offsets = subword_csr(model.vocab, model.strategy)
    matrix = np.empty((len(model.vocab), model.dim), dtype=np.float64)
    for wid in range(len(model.vocab)):
        matrix[wid] = model.input[flat[offsets[wid]:offsets[wid + 1]]].sum(axis=0)
    return matrix


def save_text(model: EmbeddingModel, path: str | Path) -> None:
    """Write composed word vectors in word2vec text format.

    Header ``V dim``, then one ``word v1 ... v_dim`` line per word with six
    significant digits, '.' decimal separator regardless of locale.
    """
    vectors = composed_matrix(model)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.vocab)} {model.dim}\n")
        for word, vec in zip(model.vocab.words, vectors):
            fh.write(word + " " + " ".join("%.6g" % v for v in vec) + "\n")


def load_text(path: str | Path) -> EmbeddingModel:
    """Load a word2vec text file as a whole-word model.

    Input rows are the stored composed vectors; output rows are zero. The
    reconstructed vocabulary keeps file order with unit counts.
    """
    lines = read_text(path).splitlines()
    if not lines:
        raise ValueError(f"{path}:1: missing header line")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}:1: header must be 'V dim'")
    try:
        n_words, dim = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"{path}:1: header must be 'V dim'") from None
    if len(lines) - 1 < n_words:
        raise ValueError(f"{path}: header promises {n_words} rows, "
                         f"found {len(lines) - 1}")
    words = []
    vectors = np.empty((n_words, dim), dtype=np.float64)
    for row, line in enumerate(lines[1:n_words + 1]):
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise ValueError(f"{path}:{row + 2}: expected {dim + 1} fields, "
                             f"got {len(parts)}")
        words.append(parts[0])
        vectors[row] = [float(v) for v in parts[1:]]
    vocab = Vocabulary.from_items([(w, 1) for w in words])
    return EmbeddingModel(dim=dim, vocab=vocab, strategy=WholeWord(),
                          input=vectors,
                          output=np.zeros((n_words, dim), dtype=np.float64))


def save_checkpoint(model: EmbeddingModel, path: str | Path) -> None:
    """Write the native checkpoint: magic, JSON header, raw matrices.

    Layout: ``MGLAB1`` + little-endian uint32 header length + UTF-8 JSON
    header + C-order float64 bytes of the input then output matrix. The
    header carries dim, vocabulary, strategy descriptor and row counts.
    """
    if not np.isfinite(model.input).all() or not np.isfinite(model.output).all():
        raise ValueError("refusing to checkpoint non-finite matrices")
    header = {
        "version": 1,
        "dim": model.dim,
        "dtype": "float64",
        "input_rows": int(model.input.shape[0]),
        "output_rows": int(model.output.shape[0]),
        "strategy": strategy_to_descriptor(model.strategy),
        "words": model.vocab.words,
        "counts": [int(c) for c in model.vocab.counts],
    }
    blob = json.dumps(header, ensure_ascii=False,
                      separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(model.input).tobytes())
        fh.write(np.ascontiguousarray(model.output).tobytes())


def load_checkpoint(path: str | Path) -> EmbeddingModel:
    raw = Path(path).read_bytes()
    if raw[:len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a {CHECKPOINT_MAGIC.decode()} checkpoint")
    pos = len(CHECKPOINT_MAGIC)
    (header_len,) = struct.unpack_from("<I", raw, pos)
    pos += 4
    header = json.loads(raw[pos:pos + header_len].decode("utf-8"))
    pos += header_len
    if header.get("version") != 1:
        raise ValueError(f"{path}: unsupported checkpoint version "
                         f"{header.get('version')!r}")
    dim = header["dim"]
    in_rows, out_rows = header["input_rows"], header["output_rows"]
    need = (in_rows + out_rows) * dim * 8
    if len(raw) - pos != need:
        raise ValueError(f"{path}: matrix payload is {len(raw) - pos} bytes, "
                         f"expected {need}")
    inp = np.frombuffer(raw, dtype=np.float64, count=in_rows * dim,
                        offset=pos).reshape(in_rows, dim).copy()
    out = np.frombuffer(raw, dtype=np.float64, count=out_rows * dim,
                        offset=pos + in_rows * dim * 8).reshape(out_rows, dim).copy()
    vocab = Vocabulary.from_items(list(zip(header["words"], header["counts"])))
    strategy = strategy_from_descriptor(header["strategy"])
    model = EmbeddingModel(dim=dim, vocab=vocab, strategy=strategy,
                           input=inp, output=out)
    if in_rows != len(vocab) + extra_rows(strategy):
        raise ValueError(f"{path}: input rows {in_rows} inconsistent with "
                         f"vocabulary and strategy")
    return model


def load_model(path: str | Path) -> EmbeddingModel:
    """Load either a native checkpoint or a word2vec text file (sniffed)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
    if magic == CHECKPOINT_MAGIC:
        return load_checkpoint(path)
    return load_text(path)
