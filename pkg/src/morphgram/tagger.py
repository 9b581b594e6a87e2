"""Window-based POS/chunk tagger over frozen pretrained embeddings.

One shared affine map over a sliding token window, a tanh hidden layer and
a logit layer: the per-token equivalent of a single-convolution network.
Word embeddings are never updated; learned pad and unk vectors stand in for
out-of-sentence positions and out-of-vocabulary tokens.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import read_text
from .model import EmbeddingModel, composed_matrix

logger = logging.getLogger(__name__)


@dataclass
class TaggedCorpus:
    sentences: list[tuple[list[str], list[str]]]
    labels: list[str]
    label_index: dict[str, int]
    label_column: int


def read_conll(path: str | Path, label_column: int = 1) -> TaggedCorpus:
    """Read CoNLL-2000-style columns: token POS chunk, blank-line sentences.

    ``label_column`` selects the tag column (1 = POS, 2 = chunk). Label ids
    are assigned by first appearance.
    """
    sentences = []
    labels: list[str] = []
    label_index: dict[str, int] = {}
    tokens: list[str] = []
    tags: list[str] = []
    for lineno, line in enumerate(read_text(path).splitlines() + [""],
                                  start=1):
        if not line.strip():
            if tokens:
                sentences.append((tokens, tags))
                tokens, tags = [], []
            continue
        fields = line.split()
        if len(fields) <= label_column:
            raise ValueError(f"{path}:{lineno}: expected at least "
                             f"{label_column + 1} columns, got {len(fields)}")
        tokens.append(fields[0])
        tag = fields[label_column]
        if tag not in label_index:
            label_index[tag] = len(labels)
            labels.append(tag)
        tags.append(tag)
    if not sentences:
        raise ValueError(f"{path}: no sentences found")
    return TaggedCorpus(sentences=sentences, labels=labels,
                        label_index=label_index, label_column=label_column)


@dataclass
class TaggerParams:
    W1: np.ndarray  # (window*dim, hidden)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (hidden, n_labels)
    b2: np.ndarray  # (n_labels,)
    pad: np.ndarray  # (dim,) learned out-of-sentence vector
    unk: np.ndarray  # (dim,) learned out-of-vocabulary vector
    window: int
    labels: list[str]

    @classmethod
    def create(cls, dim: int, n_labels: int, window: int = 5,
               hidden: int = 128, seed: int = 1,
               labels: list[str] | None = None) -> "TaggerParams":
        if window < 1 or window % 2 == 0:
            raise ValueError(f"window must be odd and >= 1, got {window}")
        if labels is None:
            labels = [str(i) for i in range(n_labels)]
        rng = np.random.default_rng(seed)
        wd = window * dim
        scale1 = 1.0 / np.sqrt(wd)
        scale2 = 1.0 / np.sqrt(hidden)
        return cls(
            W1=rng.uniform(-scale1, scale1, size=(wd, hidden)),
            b1=np.zeros(hidden),
            W2=rng.uniform(-scale2, scale2, size=(hidden, n_labels)),
            b2=np.zeros(n_labels),
            pad=np.zeros(dim),
            unk=np.zeros(dim),
            window=window,
            labels=list(labels),
        )

    def save(self, path: str | Path) -> None:
        np.savez(path, W1=self.W1, b1=self.b1, W2=self.W2, b2=self.b2,
                 pad=self.pad, unk=self.unk, window=np.int64(self.window),
                 labels=np.array(self.labels))

    @classmethod
    def load(cls, path: str | Path) -> "TaggerParams":
        data = np.load(path, allow_pickle=False)
        return cls(W1=data["W1"], b1=data["b1"], W2=data["W2"], b2=data["b2"],
                   pad=data["pad"], unk=data["unk"],
                   window=int(data["window"]),
                   labels=[str(w) for w in data["labels"]])


def encode_window(sentence: list[str], position: int, model: EmbeddingModel,
                  params: TaggerParams,
                  vectors: np.ndarray | None = None) -> np.ndarray:
    """Concatenated composed embeddings around one position.

    Out-of-range positions contribute the pad vector, out-of-vocabulary
    tokens the unk vector. ``vectors`` may carry precomputed composed rows.
    """
    if not 0 <= position < len(sentence):
        raise ValueError(f"position {position} outside sentence of length "
                         f"{len(sentence)}")
    if vectors is None:
        vectors = composed_matrix(model)
    hw = params.window // 2
    parts = []
    for q in range(position - hw, position + hw + 1):
        if q < 0 or q >= len(sentence):
            parts.append(params.pad)
        elif sentence[q] in model.vocab:
            parts.append(vectors[model.vocab.id_of(sentence[q])])
        else:
            parts.append(params.unk)
    return np.concatenate(parts)


def forward(x: np.ndarray, params: TaggerParams) -> np.ndarray:
    """Logits for one window vector: W2^T tanh(W1^T x + b1) + b2."""
    return params.W2.T @ np.tanh(params.W1.T @ x + params.b1) + params.b2


def predict(x: np.ndarray, params: TaggerParams) -> int:
    """Predicted label id: argmax logit, lowest id on ties."""
    return int(np.argmax(forward(x, params)))


def loss_and_grads(x: np.ndarray, label: int,
                   params: TaggerParams) -> tuple[float, dict[str, np.ndarray]]:
    """Softmax cross-entropy and its analytic gradients for one example.

    The ``x`` gradient is returned so callers can route slices of it into
    the pad/unk vectors.
    """
    a = params.W1.T @ x + params.b1
    z = np.tanh(a)
    logits = params.W2.T @ z + params.b2
    m = logits.max()
    exps = np.exp(logits - m)
    total = exps.sum()
    loss = float(np.log(total) + m - logits[label])
    dlogits = exps / total
    dlogits[label] -= 1.0
    dz = params.W2 @ dlogits
    da = (1.0 - z * z) * dz
    grads = {
        "W2": np.outer(z, dlogits),
        "b2": dlogits,
        "W1": np.outer(x, da),
        "b1": da,
        "x": params.W1 @ da,
    }
    return loss, grads


def _corpus_arrays(corpus: TaggedCorpus, model: EmbeddingModel,
                   label_index: dict[str, int],
                   ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten sentences to CSR id arrays: -1 marks OOV tokens, labels
    missing from the inventory map to -1 (always scored as errors)."""
    vocab = model.vocab
    tok, lab, offsets = [], [], [0]
    for tokens, tags in corpus.sentences:
        tok.extend(vocab.index.get(t, -1) for t in tokens)
        lab.extend(label_index.get(t, -1) for t in tags)
        offsets.append(len(tok))
    return (np.asarray(tok, dtype=np.int32), np.asarray(lab, dtype=np.int32),
            np.asarray(offsets, dtype=np.int64))


def train_tagger(corpus: TaggedCorpus, model: EmbeddingModel,
                 epochs: int = 20, lr: float = 0.01, window: int = 5,
                 hidden: int = 128, seed: int = 1) -> TaggerParams:
    """Per-token SGD at a fixed learning rate over shuffled sentences.

    Word embeddings stay frozen; all tagger parameters including the pad
    and unk vectors are updated. Deterministic under a fixed seed.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if lr < 0:
        raise ValueError(f"lr must be >= 0, got {lr}")
    params = TaggerParams.create(dim=model.dim, n_labels=len(corpus.labels),
                                 window=window, hidden=hidden, seed=seed,
                                 labels=corpus.labels)
    E = composed_matrix(model)
    tok, lab, offsets = _corpus_arrays(corpus, model, corpus.label_index)
    if (lab < 0).any():
        raise ValueError("training corpus contains labels outside its own "
                         "inventory")  # cannot happen for read_conll corpora
    rng = np.random.default_rng(seed)
    n_sentences = len(corpus.sentences)
    logger.info("tagger training on %s backend: %d sentences, %d labels, "
                "window=%d hidden=%d", kernels.backend_name(), n_sentences,
                len(corpus.labels), window, hidden)
    for epoch in range(epochs):
        order = rng.permutation(n_sentences).astype(np.int64)
        loss_out = np.zeros(1)
        status = kernels.tagger_epoch(E, params.pad, params.unk, params.W1,
                                      params.b1, params.W2, params.b2, tok,
                                      lab, offsets, order, window, lr,
                                      loss_out)
        if status != 0:
            raise RuntimeError(f"NaN loss in tagger epoch {epoch}; aborting")
        logger.info("tagger epoch=%d mean_loss=%.6g", epoch,
                    loss_out[0] / max(1, len(tok)))
    return params


def evaluate_tagger(params: TaggerParams, corpus: TaggedCorpus,
                    model: EmbeddingModel) -> float:
    """Token accuracy; gold labels missing from the inventory count as
    errors."""
    if not corpus.sentences:
        raise ValueError("cannot evaluate on an empty corpus")
    label_index = {lab: i for i, lab in enumerate(params.labels)}
    E = composed_matrix(model)
    dim = model.dim
    hw = params.window // 2
    correct = total = 0
    for tokens, tags in corpus.sentences:
        n = len(tokens)
        rows = np.empty((n, dim))
        for i, token in enumerate(tokens):
            wid = model.vocab.index.get(token, -1)
            rows[i] = params.unk if wid < 0 else E[wid]
        padded = np.vstack([np.tile(params.pad, (hw, 1)), rows,
                            np.tile(params.pad, (hw, 1))])
        windows = np.stack([padded[i:i + params.window].ravel()
                            for i in range(n)])
        logits = np.tanh(windows @ params.W1 + params.b1) @ params.W2 + params.b2
        predictions = logits.argmax(axis=1)
        for i, tag in enumerate(tags):
            total += 1
            if label_index.get(tag, -1) == predictions[i]:
                correct += 1
    return correct / total
