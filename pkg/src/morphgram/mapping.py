"""Supervised cross-lingual mapping: orthogonal Procrustes over a seed
dictionary, with nearest-neighbor translation retrieval."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import read_text
from .model import EmbeddingModel, composed_matrix

logger = logging.getLogger(__name__)

DEFAULT_NORMALIZE = ("unit", "center", "unit")


def normalize(matrix: np.ndarray, steps: Sequence[str] = DEFAULT_NORMALIZE,
              words: Sequence[str] | None = None) -> np.ndarray:
    """Apply normalization steps in order; does not modify the input.

    ``unit`` scales each row to Euclidean norm 1 (a zero row is an error,
    named via ``words`` when given); ``center`` subtracts column means.
    """
    result = np.array(matrix, dtype=np.float64, copy=True)
    for step in steps:
        if step == "unit":
            norms = np.linalg.norm(result, axis=1)
            if (norms == 0.0).any():
                row = int(np.argmax(norms == 0.0))
                name = words[row] if words is not None else f"row {row}"
                raise ValueError(f"cannot unit-normalize zero vector for "
                                 f"{name!r}")
            result /= norms[:, None]
        elif step == "center":
            result -= result.mean(axis=0)
        else:
            raise ValueError(f"unknown normalization step {step!r}")
    return result


def procrustes(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Orthogonal matrix W minimizing ||source @ W - target||_F.

    Closed form: W = U V^T from the SVD of source^T target. Rows must be
    paired (one dictionary entry per row).
    """
    if source.shape != target.shape:
        raise ValueError(f"paired matrices must share a shape, got "
                         f"{source.shape} vs {target.shape}")
    product = source.T @ target
    u, s, vt = np.linalg.svd(product)
    if s[-1] <= s[0] * 1e-12:
        logger.warning("rank-deficient dictionary cross-covariance; the "
                       "transform is not unique")
    return u @ vt


@dataclass
class BilingualDictionary:
    entries: list[tuple[str, str]]


def load_dictionary(path: str | Path) -> BilingualDictionary:
    """Load whitespace-separated ``source target`` pairs, one per line."""
    entries = []
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            logger.warning("%s:%d: expected 'source target', skipping line",
                           path, lineno)
            continue
        entries.append((fields[0], fields[1]))
    if not entries:
        raise ValueError(f"{path}: no dictionary entries")
    return BilingualDictionary(entries=entries)


@dataclass
class MappingResult:
    transform: np.ndarray
    normalization: tuple[str, ...]
    p_at: dict[int, float]
    train_used: int
    train_oov: int
    test_used: int
    test_oov: int


def eval_mapping(source_model: EmbeddingModel, target_model: EmbeddingModel,
                 train_dict: BilingualDictionary,
                 test_dict: BilingualDictionary,
                 k_values: Sequence[int] = (1, 10),
                 normalize_steps: Sequence[str] = DEFAULT_NORMALIZE,
                 ) -> MappingResult:
    """Fit the transform on the train dictionary and score precision@k.

    Precision is computed per distinct test source word: it counts when any
    of the word's gold translations appears among the k nearest target words
    by cosine in the mapped space. Out-of-vocabulary entries on either side
    are dropped and counted.
    """
    src_vocab, trg_vocab = source_model.vocab, target_model.vocab
    x_all = normalize(composed_matrix(source_model), normalize_steps,
                      words=src_vocab.words)
    y_all = normalize(composed_matrix(target_model), normalize_steps,
                      words=trg_vocab.words)

    src_rows, trg_rows = [], []
    train_oov = 0
    for src, trg in train_dict.entries:
        if src in src_vocab and trg in trg_vocab:
            src_rows.append(src_vocab.id_of(src))
            trg_rows.append(trg_vocab.id_of(trg))
        else:
            train_oov += 1
    if not src_rows:
        raise ValueError("no usable train dictionary entries (all out of "
                         "vocabulary)")
    transform = procrustes(x_all[src_rows], y_all[trg_rows])

    # gold targets per distinct source word
    gold: dict[str, set[int]] = {}
    test_oov = 0
    for src, trg in test_dict.entries:
        if src not in src_vocab or trg not in trg_vocab:
            test_oov += 1
            continue
        gold.setdefault(src, set()).add(trg_vocab.id_of(trg))
    if not gold:
        raise ValueError("no usable test dictionary entries (all out of "
                         "vocabulary)")

    sources = sorted(gold)  # entry order must not affect the result
    mapped = x_all[[src_vocab.id_of(s) for s in sources]] @ transform
    norms = np.linalg.norm(mapped, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    mapped /= norms
    target_unit = y_all / np.linalg.norm(y_all, axis=1, keepdims=True)
    sims = mapped @ target_unit.T

    k_values = sorted(set(int(k) for k in k_values))
    k_max = min(max(k_values), len(trg_vocab))
    top = np.argsort(-sims, axis=1, kind="stable")[:, :k_max]
    p_at = {}
    for k in k_values:
        hits = sum(1 for i, s in enumerate(sources)
                   if gold[s] & set(top[i, :min(k, k_max)].tolist()))
        p_at[k] = hits / len(sources)
    return MappingResult(transform=transform,
                         normalization=tuple(normalize_steps), p_at=p_at,
                         train_used=len(src_rows), train_oov=train_oov,
                         test_used=len(sources), test_oov=test_oov)


def format_mapping_report(result: MappingResult) -> str:
    lines = [
        f"normalization\t{','.join(result.normalization)}",
        f"train_pairs_used\t{result.train_used}",
        f"train_pairs_oov\t{result.train_oov}",
        f"test_sources_used\t{result.test_used}",
        f"test_entries_oov\t{result.test_oov}",
    ]
    for k, p in sorted(result.p_at.items()):
        lines.append(f"p@{k}\t{p:.6f}")
    return "\n".join(lines) + "\n"
