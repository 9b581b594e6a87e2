import numpy as np
import pytest

from morphgram.corpus import Vocabulary, build_vocab
from morphgram.model import (
    EmbeddingModel,
    compose,
    composed_matrix,
    load_checkpoint,
    load_model,
    load_text,
    save_checkpoint,
    save_text,
    score,
)
from morphgram.segmenter import CharNgrams, MorphLexicon, WholeWord

from conftest import make_whole_model


@pytest.fixture
def vocab4():
    return build_vocab("aa aa aa bb bb cd cd ef".split(), min_count=1,
                       max_vocab=10)


class TestCreate:
    def test_shapes_and_init(self, vocab4):
        model = EmbeddingModel.create(vocab4, CharNgrams(3, 3, 50), dim=12,
                                      seed=9)
        assert model.input.shape == (4 + 50, 12)
        assert model.output.shape == (4, 12)
        assert (model.output == 0).all()
        bound = 1.0 / (2 * 12)
        assert (np.abs(model.input) <= bound).all()
        assert model.input.std() > 0

    def test_seed_reproducible(self, vocab4):
        a = EmbeddingModel.create(vocab4, WholeWord(), dim=8, seed=3)
        b = EmbeddingModel.create(vocab4, WholeWord(), dim=8, seed=3)
        assert (a.input == b.input).all()

    def test_dim_validation(self, vocab4):
        with pytest.raises(ValueError):
            EmbeddingModel.create(vocab4, WholeWord(), dim=0)


class TestCompose:
    def test_zero_rows_give_zero_vector(self, vocab4):
        model = EmbeddingModel.create(vocab4, CharNgrams(3, 3, 50), dim=4)
        model.input[:] = 0.0
        assert (compose("aa", model) == 0).all()

    def test_whole_is_exactly_own_row(self, vocab4):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4, seed=2)
        wid = vocab4.id_of("bb")
        assert (compose("bb", model) == model.input[wid]).all()

    def test_two_unit_sum(self, vocab4):
        strategy = MorphLexicon({"cd": ["c-", "-d"]})
        model = EmbeddingModel.create(vocab4, strategy, dim=2)
        model.input[:] = 0.0
        model.input[vocab4.id_of("cd")] = [1.0, 0.0]
        model.input[4 + 0] = [0.5, 1.0]  # morpheme "c-"
        model.input[4 + 1] = [-0.5, 1.0]  # morpheme "-d"
        assert compose("cd", model).tolist() == [1.0, 2.0]

    def test_oov_raises(self, vocab4):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4)
        with pytest.raises(KeyError):
            compose("zz", model)


class TestScore:
    def test_dot_product(self):
        model = make_whole_model(["w"], 2, input_rows=[[1.0, 2.0]],
                                 output_rows=[[3.0, 4.0]])
        assert score("w", "w", model) == 11.0

    def test_zero_output_row(self, vocab4):
        model = EmbeddingModel.create(vocab4, CharNgrams(3, 3, 50), dim=4,
                                      seed=5)
        assert score("aa", "bb", model) == 0.0

    def test_whole_reduces_to_plain_inner_product(self, vocab4):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=6, seed=7)
        rng = np.random.default_rng(0)
        model.input = rng.normal(size=model.input.shape)
        model.output = rng.normal(size=model.output.shape)
        for center in vocab4.words:
            for context in vocab4.words:
                plain = float(np.dot(model.input[vocab4.id_of(center)],
                                     model.output[vocab4.id_of(context)]))
                assert score(center, context, model) == plain

    def test_linear_in_subword_rows(self, vocab4):
        strategy = CharNgrams(2, 3, 29)
        model = EmbeddingModel.create(vocab4, strategy, dim=5, seed=1)
        rng = np.random.default_rng(1)
        model.input = rng.normal(size=model.input.shape)
        model.output = rng.normal(size=model.output.shape)
        before = score("cd", "bb", model)
        model.input *= 2.0
        assert score("cd", "bb", model) == pytest.approx(2 * before, rel=1e-12)


def test_composed_matrix_matches_compose(vocab4):
    model = EmbeddingModel.create(vocab4, CharNgrams(2, 4, 33), dim=7, seed=4)
    matrix = composed_matrix(model)
    for wid, word in enumerate(vocab4.words):
        assert np.allclose(matrix[wid], compose(word, model), atol=0, rtol=0)


class TestTextFormat:
    def test_roundtrip_within_print_precision(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, CharNgrams(2, 3, 40), dim=5,
                                      seed=11)
        path = tmp_path / "vec.txt"
        save_text(model, path)
        loaded = load_text(path)
        assert loaded.vocab.words == vocab4.words
        original = composed_matrix(model)
        assert np.abs(composed_matrix(loaded) - original).max() < 1e-5

    def test_save_load_save_byte_identical(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=3, seed=13)
        model.input = np.random.default_rng(5).normal(size=model.input.shape)
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        save_text(model, first)
        save_text(load_text(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_empty_model(self, tmp_path):
        model = EmbeddingModel.create(Vocabulary.from_items([]), WholeWord(),
                                      dim=30)
        path = tmp_path / "empty.txt"
        save_text(model, path)
        assert path.read_text(encoding="utf-8") == "30".join(["0 ", "\n"])

    def test_decimal_point_not_comma(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4, seed=17)
        path = tmp_path / "vec.txt"
        save_text(model, path)
        body = path.read_text(encoding="utf-8")
        assert "," not in body and "." in body

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not a header\nx 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            load_text(path)

    def test_row_arity_mismatch_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 3\na 1 2 3\nb 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":3:"):
            load_text(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("5 2\na 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="promises"):
            load_text(path)


class TestCheckpoint:
    @pytest.mark.parametrize("strategy", [
        WholeWord(),
        CharNgrams(2, 4, 64),
        MorphLexicon({"cd": ["c", "d"], "ef": ["e", "f"]}),
    ])
    def test_roundtrip_exact(self, vocab4, tmp_path, strategy):
        model = EmbeddingModel.create(vocab4, strategy, dim=6, seed=23)
        rng = np.random.default_rng(6)
        model.input = rng.normal(size=model.input.shape)
        model.output = rng.normal(size=model.output.shape)
        path = tmp_path / "model.bin"
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert (loaded.input == model.input).all()
        assert (loaded.output == model.output).all()
        assert loaded.vocab.words == model.vocab.words
        assert loaded.vocab.counts.tolist() == model.vocab.counts.tolist()
        assert type(loaded.strategy) is type(model.strategy)

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.bin"
        path.write_bytes(b"NOTMAGIC plus junk")
        with pytest.raises(ValueError, match="MGLAB1"):
            load_checkpoint(path)

    def test_rejects_truncated_payload(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4, seed=1)
        path = tmp_path / "model.bin"
        save_checkpoint(model, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="payload"):
            load_checkpoint(path)

    def test_rejects_nan_matrices(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4, seed=1)
        model.input[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            save_checkpoint(model, tmp_path / "model.bin")

    def test_load_model_sniffs_format(self, vocab4, tmp_path):
        model = EmbeddingModel.create(vocab4, WholeWord(), dim=4, seed=29)
        ckpt, text = tmp_path / "m.bin", tmp_path / "m.txt"
        save_checkpoint(model, ckpt)
        save_text(model, text)
        assert isinstance(load_model(ckpt).strategy, WholeWord)
        assert load_model(text).vocab.words == vocab4.words
