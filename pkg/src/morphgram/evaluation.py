"""Intrinsic evaluation: Spearman word similarity and 3CosAdd analogies."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import read_text
from .model import EmbeddingModel, composed_matrix

logger = logging.getLogger(__name__)


@dataclass
class SimilarityDataset:
    pairs: list[tuple[str, str, float]]


@dataclass
class AnalogyQuadruple:
    a: str
    b: str
    c: str
    answers: frozenset[str]


@dataclass
class AnalogyDataset:
    categories: list[tuple[str, list[AnalogyQuadruple]]]


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Fractional ranks (1-based); ties get the mean of their rank span."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of tie-averaged fractional ranks."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    if (x == x[0]).all() or (y == y[0]).all():
        raise ValueError("correlation undefined for a constant list")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(u @ v / (nu * nv))


def load_similarity(path: str | Path, columns: tuple[int, int, int] = (0, 1, 3),
                    skip_lines: int = 1) -> SimilarityDataset:
    """Load a word-pair similarity TSV.

    ``columns`` selects the word1/word2/score fields (SimLex-style layout by
    default); ``skip_lines`` drops header lines.
    """
    c1, c2, cs = columns
    need = max(columns) + 1
    pairs = []
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if lineno <= skip_lines or not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 1:
            fields = line.split()
        if len(fields) < need:
            logger.warning("%s:%d: expected >= %d columns, skipping line",
                           path, lineno, need)
            continue
        try:
            score = float(fields[cs])
        except ValueError:
            logger.warning("%s:%d: non-numeric score %r, skipping line",
                           path, lineno, fields[cs])
            continue
        pairs.append((fields[c1], fields[c2], score))
    if not pairs:
        raise ValueError(f"{path}: no usable similarity pairs")
    return SimilarityDataset(pairs=pairs)


def eval_similarity(model: EmbeddingModel,
                    dataset: SimilarityDataset) -> tuple[float, int, int]:
    """Spearman correlation of composed-vector cosine against human scores.

    Pairs with any out-of-vocabulary word are dropped and counted. Returns
    ``(rho, used_pairs, oov_pairs)``.
    """
    vocab = model.vocab
    vectors = composed_matrix(model)
    human, scores = [], []
    oov = 0
    for w1, w2, gold in dataset.pairs:
        if w1 not in vocab or w2 not in vocab:
            oov += 1
            continue
        human.append(gold)
        scores.append(_cosine(vectors[vocab.id_of(w1)],
                              vectors[vocab.id_of(w2)]))
    if len(human) < 2:
        raise ValueError(f"fewer than 2 usable pairs ({len(human)} in "
                         f"vocabulary, {oov} dropped)")
    return spearman(scores, human), len(human), oov


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


def solve_analogy(model: EmbeddingModel, a: str, b: str, c: str,
                  exclude: set[str] | None = None,
                  unit_vectors: np.ndarray | None = None) -> str:
    """3CosAdd: the vocabulary word closest to b - a + c by cosine.

    All composed vectors are length-normalized first; the ``exclude`` words
    (a, b and c by default) can never be returned. Ties break toward the
    lowest word id.
    """
    vocab = model.vocab
    if unit_vectors is None:
        unit_vectors = _unit_rows(composed_matrix(model))
    if exclude is None:
        exclude = {a, b, c}
    ia, ib, ic = vocab.id_of(a), vocab.id_of(b), vocab.id_of(c)
    query = unit_vectors[ib] - unit_vectors[ia] + unit_vectors[ic]
    sims = unit_vectors @ query
    for word in exclude:
        if word in vocab:
            sims[vocab.id_of(word)] = -np.inf
    return vocab.words[int(np.argmax(sims))]


@dataclass
class CategoryResult:
    name: str
    accuracy: float
    correct: int
    attempted: int
    oov: int


@dataclass
class AnalogyResult:
    categories: list[CategoryResult]
    micro_accuracy: float
    macro_accuracy: float
    correct: int
    attempted: int
    oov: int


def eval_analogy(model: EmbeddingModel,
                 dataset: AnalogyDataset) -> AnalogyResult:
    """Accuracy of 3CosAdd predictions, per category and pooled.

    A quadruple counts as attempted only when a, b, c and at least one
    answer are in vocabulary; others are excluded and counted as OOV.
    """
    vocab = model.vocab
    unit_vectors = _unit_rows(composed_matrix(model))
    per_category = []
    total_correct = total_attempted = total_oov = 0
    for name, quadruples in dataset.categories:
        correct = attempted = oov = 0
        for q in quadruples:
            answers = {d for d in q.answers if d in vocab}
            if (q.a not in vocab or q.b not in vocab or q.c not in vocab
                    or not answers):
                oov += 1
                continue
            attempted += 1
            prediction = solve_analogy(model, q.a, q.b, q.c,
                                       unit_vectors=unit_vectors)
            if prediction in answers:
                correct += 1
        accuracy = correct / attempted if attempted else 0.0
        per_category.append(CategoryResult(name=name, accuracy=accuracy,
                                           correct=correct,
                                           attempted=attempted, oov=oov))
        total_correct += correct
        total_attempted += attempted
        total_oov += oov
    if total_attempted == 0:
        raise ValueError(f"no attemptable quadruples ({total_oov} excluded "
                         f"as out of vocabulary)")
    scored = [c for c in per_category if c.attempted > 0]
    return AnalogyResult(
        categories=per_category,
        micro_accuracy=total_correct / total_attempted,
        macro_accuracy=sum(c.accuracy for c in scored) / len(scored),
        correct=total_correct,
        attempted=total_attempted,
        oov=total_oov,
    )


def load_google_analogy(path: str | Path) -> AnalogyDataset:
    """Google analogy format: ``: category`` headers, then 4-word lines."""
    categories: list[tuple[str, list[AnalogyQuadruple]]] = []
    current: list[AnalogyQuadruple] | None = None
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith(":"):
            current = []
            categories.append((line[1:].strip(), current))
            continue
        words = line.split()
        if len(words) != 4:
            logger.warning("%s:%d: expected 4 words, skipping line",
                           path, lineno)
            continue
        if current is None:
            logger.warning("%s:%d: analogy line before any ': category' "
                           "header, skipping", path, lineno)
            continue
        current.append(AnalogyQuadruple(a=words[0], b=words[1], c=words[2],
                                        answers=frozenset([words[3]])))
    if not any(quads for _, quads in categories):
        raise ValueError(f"{path}: no analogy quadruples found")
    return AnalogyDataset(categories=categories)


def _load_bats_file(path: Path) -> list[AnalogyQuadruple]:
    entries: list[tuple[str, list[str]]] = []
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        word, sep, rest = line.partition("\t")
        answers = [a for a in rest.strip().split("/") if a]
        if not sep or not word.strip() or not answers:
            logger.warning("%s:%d: expected 'word<TAB>alt1/alt2/...', "
                           "skipping line", path, lineno)
            continue
        entries.append((word.strip(), answers))
    quadruples = []
    for i, (w1, answers1) in enumerate(entries):
        for j, (w2, answers2) in enumerate(entries):
            if i == j:
                continue
            quadruples.append(AnalogyQuadruple(a=w1, b=answers1[0], c=w2,
                                               answers=frozenset(answers2)))
    return quadruples


def load_bats(path: str | Path) -> AnalogyDataset:
    """BATS format: per-category pair files expanded to ordered line pairs.

    Each file holds lines ``word<TAB>alt1/alt2/...``; n lines produce
    n*(n-1) quadruples with the second line's alternatives as answers. A
    directory is read as one category per file, in sorted name order.
    """
    path = Path(path)
    if path.is_dir():
        categories = [(p.stem, _load_bats_file(p))
                      for p in sorted(path.iterdir()) if p.is_file()]
    else:
        categories = [(path.stem, _load_bats_file(path))]
    if not any(quads for _, quads in categories):
        raise ValueError(f"{path}: no analogy quadruples found")
    return AnalogyDataset(categories=categories)


def format_similarity_report(rho: float, used: int, oov: int) -> str:
    return f"rho\t{rho:.6f}\nused\t{used}\noov\t{oov}\n"


def format_analogy_report(result: AnalogyResult) -> str:
    lines = ["category\taccuracy\tcorrect\tattempted\toov"]
    for c in result.categories:
        lines.append(f"{c.name}\t{c.accuracy:.6f}\t{c.correct}"
                     f"\t{c.attempted}\t{c.oov}")
    lines.append(f"macro\t{result.macro_accuracy:.6f}\t-\t-\t-")
    lines.append(f"micro\t{result.micro_accuracy:.6f}\t{result.correct}"
                 f"\t{result.attempted}\t{result.oov}")
    return "\n".join(lines) + "\n"
