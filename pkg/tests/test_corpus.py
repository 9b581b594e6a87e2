import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from morphgram.corpus import (
    CorpusStats,
    Vocabulary,
    build_vocab,
    keep_probabilities,
    keep_probability,
    lines_to_ids,
    load_corpus,
    read_text,
    tokenize,
)


class TestTokenize:
    def test_whitespace_split(self):
        assert tokenize("Hello world\n") == ["Hello", "world"]

    def test_empty(self):
        assert tokenize("") == []

    def test_repeated_separators_collapse(self):
        assert tokenize("a  b\tc") == ["a", "b", "c"]

    def test_no_case_folding_or_punctuation_stripping(self):
        assert tokenize("Foo, БАР!") == ["Foo,", "БАР!"]


def test_read_text_reports_byte_offset(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_bytes(b"ok here \xff\xfe nope")
    with pytest.raises(ValueError, match="byte offset 8"):
        read_text(path)


class TestBuildVocab:
    def test_min_count_filters(self):
        vocab = build_vocab("a a b".split(), min_count=2, max_vocab=100)
        assert vocab.words == ["a"]
        assert vocab.counts.tolist() == [2]
        assert vocab.total_tokens == 2

    def test_cap_keeps_most_frequent(self):
        vocab = build_vocab("a a b b c".split(), min_count=1, max_vocab=2)
        assert set(vocab.words) == {"a", "b"}

    def test_first_occurrence_tie_break(self):
        vocab = build_vocab("x y x y".split(), min_count=1, max_vocab=100)
        assert vocab.words == ["x", "y"]

    def test_empty_stream(self):
        vocab = build_vocab([], min_count=1, max_vocab=10)
        assert len(vocab) == 0
        assert vocab.total_tokens == 0

    def test_everything_filtered_warns(self, caplog):
        with caplog.at_level("WARNING"):
            vocab = build_vocab(["a", "b"], min_count=5, max_vocab=10)
        assert len(vocab) == 0
        assert "min_count" in caplog.text

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            build_vocab(["a"], min_count=0)
        with pytest.raises(ValueError):
            build_vocab(["a"], min_count=1, max_vocab=0)

    def test_ids_dense_and_consistent(self):
        vocab = build_vocab("the quick the lazy the quick dog".split(),
                            min_count=1, max_vocab=100)
        for i, word in enumerate(vocab.words):
            assert vocab.index[word] == i
        assert sorted(vocab.index.values()) == list(range(len(vocab)))
        assert (np.diff(vocab.counts) <= 0).all()

    @given(st.lists(st.sampled_from("abcdefgh"), max_size=200),
           st.integers(1, 3), st.integers(1, 8))
    def test_retained_at_most_raw(self, tokens, min_count, max_vocab):
        vocab = build_vocab(tokens, min_count=min_count, max_vocab=max_vocab)
        assert vocab.total_tokens <= len(tokens)
        assert len(vocab) <= max_vocab
        assert all(c >= min_count for c in vocab.counts)

    @given(st.lists(st.sampled_from(["aa", "b", "cc", "d"]), max_size=100))
    def test_deterministic_serialization(self, tokens):
        import tempfile
        from pathlib import Path
        with tempfile.TemporaryDirectory() as out:
            paths = [Path(out) / "v1.tsv", Path(out) / "v2.tsv"]
            for path in paths:
                build_vocab(tokens, min_count=1, max_vocab=100).save(path)
            assert paths[0].read_bytes() == paths[1].read_bytes()


def test_vocab_save_load_roundtrip(tmp_path):
    vocab = build_vocab("b b b a a c".split(), min_count=1, max_vocab=100)
    path = tmp_path / "vocab.tsv"
    vocab.save(path)
    assert path.read_text(encoding="utf-8") == "b\t3\na\t2\nc\t1\n"
    loaded = Vocabulary.load(path)
    assert loaded.words == vocab.words
    assert loaded.counts.tolist() == vocab.counts.tolist()
    assert loaded.index == vocab.index


def test_vocab_lookup_error():
    vocab = build_vocab(["a"], min_count=1)
    with pytest.raises(KeyError, match="missing"):
        vocab.id_of("missing")


def test_load_corpus_stats(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("a a b c\n\na b\n", encoding="utf-8")
    vocab, stats = load_corpus([path], min_count=2, max_vocab=10)
    assert stats == CorpusStats(raw_token_count=6, retained_token_count=5,
                                distinct_before_cap=3)
    assert set(vocab.words) == {"a", "b"}


def test_lines_to_ids_drops_oov_and_empty_lines(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("a a b x\ny\na b\n", encoding="utf-8")
    vocab, _ = load_corpus([path], min_count=2, max_vocab=10)
    tokens, offsets = lines_to_ids([path], vocab)
    ia, ib = vocab.id_of("a"), vocab.id_of("b")
    # the all-OOV middle line vanishes entirely
    assert offsets.tolist() == [0, 3, 5]
    assert tokens.tolist() == [ia, ia, ib, ia, ib]


class TestKeepProbability:
    def test_boundary_f_equals_t(self):
        assert keep_probability(1, 10, threshold=0.1) == 1.0

    def test_direct_substitution(self):
        assert keep_probability(100, 10_000, 1e-4) == pytest.approx(0.11)

    def test_derived_quarter_case(self):
        # sqrt(1e-4 / 4e-4) + 1e-4/4e-4 = 0.5 + 0.25
        assert keep_probability(4, 10_000, 1e-4) == pytest.approx(0.75)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            keep_probability(0, 10, 0.1)
        with pytest.raises(ValueError):
            keep_probability(11, 10, 0.1)
        with pytest.raises(ValueError):
            keep_probability(1, 10, 0)

    @given(st.floats(1e-6, 1e-2), st.integers(1, 999))
    def test_monotone_nonincreasing_above_threshold(self, t, step):
        total = 1_000_000
        f_low = max(1, math.ceil(t * total))
        f_high = min(total, f_low + step)
        assert (keep_probability(f_low, total, t)
                >= keep_probability(f_high, total, t))


def test_keep_probabilities_matches_scalar():
    vocab = build_vocab("a a a a b b c".split(), min_count=1, max_vocab=10)
    vector = keep_probabilities(vocab, 0.05)
    for word, expected in zip(vocab.words, vector):
        assert expected == pytest.approx(
            keep_probability(int(vocab.counts[vocab.id_of(word)]),
                             vocab.total_tokens, 0.05))
