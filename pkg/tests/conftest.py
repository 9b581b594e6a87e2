import numpy as np
import pytest

from morphgram import EmbeddingModel, Vocabulary, WholeWord


@pytest.fixture
def small_corpus_file(tmp_path):
    """200 random lines over a 30-word vocabulary, fixed seed."""
    rng = np.random.default_rng(0)
    words = [f"w{i}" for i in range(30)]
    lines = [" ".join(rng.choice(words, size=int(rng.integers(3, 12))))
             for _ in range(200)]
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def make_whole_model(words, dim, seed=None, input_rows=None, output_rows=None):
    """Whole-word model with explicit or seeded-random matrices."""
    vocab = Vocabulary.from_items([(w, 1) for w in words])
    model = EmbeddingModel.create(vocab, WholeWord(), dim=dim,
                                  seed=0 if seed is None else seed)
    if seed is not None:
        rng = np.random.default_rng(seed)
        model.input = rng.normal(size=model.input.shape)
        model.output = rng.normal(size=model.output.shape)
    if input_rows is not None:
        model.input = np.asarray(input_rows, dtype=np.float64)
    if output_rows is not None:
        model.output = np.asarray(output_rows, dtype=np.float64)
    return model
