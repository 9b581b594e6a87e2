"""Skip-gram negative-sampling trainer over composed subword vectors."""

from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .corpus import keep_probabilities, lines_to_ids, load_corpus, Vocabulary
from .model import EmbeddingModel
from .segmenter import SegmentationStrategy, segment, subword_csr

logger = logging.getLogger(__name__)

LOG_EVERY_STEPS = 100_000


@dataclass
class TrainConfig:
    """Hyperparameters for one training run.

    ``lr0`` decays linearly to ``lr0 * 1e-4`` over the scheduled token count
    (in-vocabulary tokens times epochs). ``workers=1`` is bit-reproducible
    under a fixed seed; more workers train hogwild-style without locks.
    """

    dim: int = 300
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr0: float = 0.05
    subsample: float = 1e-4
    min_count: int = 5
    max_vocab: int = 100_000
    seed: int = 1
    workers: int = 1
    noise_exponent: float = 0.75
    table_len: int = 10_000_000

    def __post_init__(self) -> None:
        checks = [
            (self.dim >= 1, "dim must be >= 1"),
            (self.window >= 1, "window must be >= 1"),
            (self.negatives >= 1, "negatives must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.lr0 > 0, "lr0 must be > 0"),
            (self.subsample > 0, "subsample must be > 0"),
            (self.min_count >= 1, "min_count must be >= 1"),
            (self.max_vocab >= 1, "max_vocab must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.table_len >= 1, "table_len must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)


@dataclass
class NegativeTable:
    """Unigram^exponent noise distribution materialized as an id table."""

    entries: np.ndarray  # int32


def build_negative_table(vocab: Vocabulary, exponent: float = 0.75,
                         table_len: int = 10_000_000) -> NegativeTable:
    """Fill a table so word i's share tracks counts[i]**exponent.

    Deterministic round-to-cumulative fill in vocabulary id order; each
    word's relative frequency error is at most 1/table_len.
    """
    if len(vocab) == 0:
        raise ValueError("cannot build a negative table from an empty vocabulary")
    if table_len < len(vocab):
        raise ValueError(f"table_len {table_len} smaller than vocabulary "
                         f"size {len(vocab)}")
    weights = vocab.counts.astype(np.float64) ** exponent
    cum = np.cumsum(weights)
    ends = np.rint(cum / cum[-1] * table_len).astype(np.int64)
    reps = np.diff(ends, prepend=0)
    entries = np.repeat(np.arange(len(vocab), dtype=np.int32), reps)
    return NegativeTable(entries=entries)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def sgns_loss(center: str, context: str, negatives: Sequence[str],
              model: EmbeddingModel) -> float:
    """Negative-sampling loss for one positive pair and its noise words:
    ``-log s(context, center) - sum(log s(-neg, center))`` in sigmoid space.
    """
    vocab = model.vocab
    rows = segment(center, model.strategy, vocab).indices
    h = model.input[rows].sum(axis=0)
    targets = np.array([vocab.id_of(context)]
                       + [vocab.id_of(n) for n in negatives])
    scores = model.output[targets] @ h
    sig_neg = 1.0 / (1.0 + np.exp(scores[1:]))  # sigma(-s)
    return float(-math.log(_sigmoid(scores[0])) - np.log(sig_neg).sum())


def sgns_step(center: str, context: str, negatives: Sequence[str], lr: float,
              model: EmbeddingModel) -> float:
    """One SGD update; returns the pre-update loss.

    Gradients are all taken at the current point: scores and the input-side
    accumulator use pre-update output rows, then output rows and every row
    of the center's subword set are moved by ``-lr * grad`` (a row repeated
    in the set receives one update per occurrence).
    """
    if lr < 0:
        raise ValueError(f"lr must be >= 0, got {lr}")
    vocab = model.vocab
    rows = np.asarray(segment(center, model.strategy, vocab).indices)
    h = model.input[rows].sum(axis=0)
    targets = np.array([vocab.id_of(context)]
                       + [vocab.id_of(n) for n in negatives])
    scores = model.output[targets] @ h
    sig_pos = float(_sigmoid(scores[0]))
    sig_neg = 1.0 / (1.0 + np.exp(scores[1:]))
    loss = -math.log(sig_pos) - np.log(sig_neg).sum()
    g = np.empty(len(targets))
    g[0] = sig_pos - 1.0
    g[1:] = 1.0 - sig_neg
    neu = g @ model.output[targets]
    np.add.at(model.output, targets, (-lr) * np.outer(g, h))
    np.add.at(model.input, rows, (-lr) * neu)
    return float(loss)


class TrainMonitor:
    """Collects (step, lr, loss-EMA) samples and emits progress log lines."""

    def __init__(self) -> None:
        self.samples: list[tuple[int, float, float]] = []
        self._lock = threading.Lock()
        self._logged_block = -1

    def record(self, step: int, lr: float, ema: float) -> None:
        with self._lock:
            self.samples.append((step, lr, ema))
            block = step // LOG_EVERY_STEPS
            if block > self._logged_block:
                self._logged_block = block
                logger.info("step=%d lr=%.6g loss=%.6g", step, lr, ema)

    @property
    def first_ema(self) -> float:
        return self.samples[0][2]

    @property
    def last_ema(self) -> float:
        return self.samples[-1][2]


def _current_lr(lr0: float, progress: int, total_scheduled: int) -> float:
    lr = lr0 * (1.0 - (1.0 - kernels._LR_FLOOR) * (progress / total_scheduled))
    return max(lr, lr0 * kernels._LR_FLOOR)


def _chunk_lines(offsets: np.ndarray, lo: int, hi: int,
                 chunk_tokens: int) -> list[tuple[int, int]]:
    """Split lines [lo, hi) into runs of roughly chunk_tokens tokens."""
    chunks = []
    start = lo
    acc = 0
    for line in range(lo, hi):
        acc += int(offsets[line + 1] - offsets[line])
        if acc >= chunk_tokens:
            chunks.append((start, line + 1))
            start = line + 1
            acc = 0
    if start < hi:
        chunks.append((start, hi))
    return chunks


def train(paths: Sequence[str | Path], strategy: SegmentationStrategy,
          config: TrainConfig, monitor: TrainMonitor | None = None,
          epoch_callback: Callable[[int, EmbeddingModel], None] | None = None,
          ) -> EmbeddingModel:
    """Train an embedding model on newline-delimited corpus files.

    Per center position an actual window b is drawn uniformly from 1..window
    and every surviving neighbor within +-b is visited; negatives come from
    the unigram^exponent table, resampling draws equal to the positive
    context word. Aborts with a diagnostic if any update produces NaN.
    """
    vocab, stats = load_corpus(paths, config.min_count, config.max_vocab)
    tokens, offsets = lines_to_ids(paths, vocab)
    if tokens.size == 0:
        raise ValueError("corpus is empty after vocabulary filtering")
    logger.info("vocabulary: %d words (%d distinct before filtering), "
                "%d/%d tokens retained", len(vocab), stats.distinct_before_cap,
                stats.retained_token_count, stats.raw_token_count)

    model = EmbeddingModel.create(vocab, strategy, dim=config.dim,
                                  seed=config.seed)
    sub_flat, sub_offsets = subword_csr(vocab, strategy)
    keep_prob = keep_probabilities(vocab, config.subsample)
    table = build_negative_table(vocab, config.noise_exponent,
                                 config.table_len).entries

    n_lines = len(offsets) - 1
    total_scheduled = int(tokens.size) * config.epochs
    max_line_len = int(np.max(np.diff(offsets)))
    chunk_tokens = min(100_000, max(1_000, tokens.size // 10))

    workers = min(config.workers, n_lines)
    bounds = np.linspace(0, n_lines, workers + 1).astype(int)
    worker_chunks = [_chunk_lines(offsets, int(bounds[w]), int(bounds[w + 1]),
                                  chunk_tokens) for w in range(workers)]
    rng_states = [kernels.seed_state(config.seed, w) for w in range(workers)]

    progress = np.zeros(1, dtype=np.int64)
    step_count = np.zeros(1, dtype=np.int64)
    ema = np.zeros(2, dtype=np.float64)

    def run_worker(w: int) -> None:
        for line_start, line_end in worker_chunks[w]:
            status = kernels.sgns_epoch(
                model.input, model.output, tokens, offsets, line_start,
                line_end, sub_flat, sub_offsets, keep_prob, table,
                config.window, config.negatives, config.lr0, total_scheduled,
                progress, step_count, rng_states[w], ema, max_line_len)
            if status != 0:
                raise RuntimeError(
                    f"NaN loss detected near step {int(step_count[0])}; "
                    f"aborting training")
            if monitor is not None:
                monitor.record(int(step_count[0]),
                               _current_lr(config.lr0, int(progress[0]),
                                           total_scheduled),
                               float(ema[0]))

    logger.info("training on %s backend: %d lines, %d scheduled tokens, "
                "%d workers", kernels.backend_name(), n_lines,
                total_scheduled, workers)
    for epoch in range(config.epochs):
        if workers == 1:
            run_worker(0)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for future in [pool.submit(run_worker, w)
                               for w in range(workers)]:
                    future.result()
        if epoch_callback is not None:
            epoch_callback(epoch, model)
    if not np.isfinite(model.input).all() or not np.isfinite(model.output).all():
        raise RuntimeError("non-finite values in trained matrices")
    return model
