import numpy as np
import pytest
from hypothesis import given, strategies as st

from morphgram.corpus import build_vocab
from morphgram.segmenter import (
    CharNgrams,
    MorphLexicon,
    WholeWord,
    char_ngrams,
    extra_rows,
    fnv1a_32,
    hash_subword,
    load_lexicon,
    segment,
    strategy_from_descriptor,
    strategy_to_descriptor,
    subword_csr,
)


class TestCharNgrams:
    def test_cat_3_3(self):
        assert char_ngrams("cat", 3, 3) == ["<ca", "cat", "at>"]

    def test_single_char_word(self):
        assert char_ngrams("a", 3, 3) == ["<a>"]

    def test_cat_3_4_shortest_first(self):
        assert char_ngrams("cat", 3, 4) == ["<ca", "cat", "at>", "<cat", "cat>"]

    def test_duplicate_substrings_kept(self):
        assert char_ngrams("aaaa", 3, 3) == ["<aa", "aaa", "aaa", "aa>"]

    def test_unicode_code_points(self):
        assert char_ngrams("ёж", 3, 3) == ["<ёж", "ёж>"]

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            char_ngrams("", 3, 3)

    @given(st.text(alphabet="abcдё", min_size=1, max_size=8),
           st.integers(1, 4), st.integers(0, 3))
    def test_enumeration_is_complete(self, word, n_min, extra):
        n_max = n_min + extra
        grams = char_ngrams(word, n_min, n_max)
        wrapped = f"<{word}>"
        expected = sum(max(0, len(wrapped) - n + 1)
                       for n in range(n_min, n_max + 1))
        assert len(grams) == expected
        assert all(g in wrapped for g in grams)
        assert all(n_min <= len(g) <= n_max for g in grams)


PUBLISHED_FNV1A_32 = [
    (b"", 2166136261),
    (b"a", 0xE40C292C),
    (b"foobar", 0xBF9CF968),
]


@pytest.mark.parametrize("data,expected", PUBLISHED_FNV1A_32)
def test_fnv1a_published_vectors(data, expected):
    assert fnv1a_32(data) == expected


@given(st.binary(max_size=32))
def test_fnv1a_against_independent_loop(data):
    h = 2166136261
    for byte in data:
        h = ((h ^ byte) * 16777619) % 2**32
    assert fnv1a_32(data) == h


class TestHashSubword:
    def test_full_range_is_raw_hash(self):
        assert hash_subword("a", 2**32) == 0xE40C292C

    def test_empty_string_is_offset_basis(self):
        assert hash_subword("", 2**32) == 2166136261

    def test_modulo_one(self):
        assert hash_subword("a", 1) == 0

    def test_bucket_validation(self):
        with pytest.raises(ValueError):
            hash_subword("a", 0)


@pytest.fixture
def vocab8():
    # ids follow descending count: w0..w7 with counts 9..2
    tokens = []
    for i in range(8):
        tokens.extend([f"w{i}"] * (9 - i))
    return build_vocab(tokens, min_count=1, max_vocab=100)


class TestSegment:
    def test_whole_is_identity(self, vocab8):
        result = segment("w7", WholeWord(), vocab8)
        assert result.indices == [7]
        assert result.display == ["w7"]

    def test_morph_empty_lexicon_falls_back(self, vocab8):
        result = segment("w3", MorphLexicon(lexicon={}), vocab8)
        assert result.indices == [3]

    def test_char_ngrams_compose_hand_derived(self):
        tokens = ["pad"] * 7 + ["cat"] * 2
        vocab = build_vocab(tokens, min_count=1, max_vocab=100)
        assert vocab.id_of("cat") == 1
        bucket_count = 50
        result = segment("cat", CharNgrams(3, 3, bucket_count), vocab)
        v = len(vocab)
        expected = [1] + [v + hash_subword(g, bucket_count)
                          for g in ["<ca", "cat", "at>"]]
        assert result.indices == expected
        assert result.display == ["cat", "<ca", "cat", "at>"]

    def test_morph_rows_and_dedup(self, vocab8):
        strategy = MorphLexicon(lexicon={"w2": ["re", "do", "re"],
                                         "w5": ["do"]})
        assert strategy.morphemes == ["re", "do"]
        result = segment("w2", strategy, vocab8)
        assert result.indices == [2, 8 + 0, 8 + 1]  # own row, re, do
        assert result.display == ["w2", "re", "do"]
        assert segment("w5", strategy, vocab8).indices == [5, 8 + 1]

    def test_oov_word_raises(self, vocab8):
        with pytest.raises(KeyError):
            segment("unknown", WholeWord(), vocab8)

    def test_pure_function(self, vocab8):
        strategy = CharNgrams(2, 3, 17)
        first = segment("w4", strategy, vocab8)
        second = segment("w4", strategy, vocab8)
        assert first.indices == second.indices
        assert first.display == second.display

    @given(st.text(alphabet="abcxyz", min_size=1, max_size=10))
    def test_char_ngram_indices_in_range(self, word):
        vocab = build_vocab([word, word], min_count=1, max_vocab=10)
        strategy = CharNgrams(3, 6, 101)
        indices = segment(word, strategy, vocab).indices
        assert all(0 <= i < len(vocab) + 101 for i in indices)
        assert indices[0] == vocab.id_of(word)


class TestStrategyValidation:
    def test_char_ngram_bounds(self):
        with pytest.raises(ValueError):
            CharNgrams(0, 3, 10)
        with pytest.raises(ValueError):
            CharNgrams(4, 3, 10)
        with pytest.raises(ValueError):
            CharNgrams(3, 6, 0)

    def test_morph_entry_needs_morphemes(self):
        with pytest.raises(ValueError):
            MorphLexicon(lexicon={"word": []})


def test_extra_rows(vocab8):
    assert extra_rows(WholeWord()) == 0
    assert extra_rows(CharNgrams(3, 6, 1234)) == 1234
    assert extra_rows(MorphLexicon({"w": ["a", "b"], "v": ["b"]})) == 2


class TestLexiconFile:
    def test_parse_and_last_wins(self, tmp_path, caplog):
        path = tmp_path / "lex.tsv"
        path.write_text("cats\tcat s\nbroken-line\ndogs\tdog s\n"
                        "cats\tkat s\n\t empty\nx\t\n", encoding="utf-8")
        with caplog.at_level("WARNING"):
            lexicon = load_lexicon(path)
        assert lexicon == {"dogs": ["dog", "s"], "cats": ["kat", "s"]}
        assert ":2:" in caplog.text and ":5:" in caplog.text and ":6:" in caplog.text

    def test_morph_vocab_order_follows_file_order(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("walked\twalk ed\ntalks\ttalk s\n", encoding="utf-8")
        strategy = MorphLexicon(lexicon=load_lexicon(path))
        assert strategy.morphemes == ["walk", "ed", "talk", "s"]


def test_subword_csr_matches_segment(vocab8):
    strategy = CharNgrams(2, 4, 37)
    flat, offsets = subword_csr(vocab8, strategy)
    assert offsets[0] == 0 and offsets[-1] == len(flat)
    for wid, word in enumerate(vocab8.words):
        expected = segment(word, strategy, vocab8).indices
        assert flat[offsets[wid]:offsets[wid + 1]].tolist() == expected


class TestDescriptorRoundtrip:
    def test_whole(self):
        assert isinstance(
            strategy_from_descriptor(strategy_to_descriptor(WholeWord())),
            WholeWord)

    def test_char_ngrams(self):
        strategy = CharNgrams(2, 5, 999)
        assert strategy_from_descriptor(
            strategy_to_descriptor(strategy)) == strategy

    def test_morph_preserves_ids(self):
        strategy = MorphLexicon({"ab": ["a", "b"], "cb": ["c", "b"]})
        rebuilt = strategy_from_descriptor(strategy_to_descriptor(strategy))
        assert rebuilt.morphemes == strategy.morphemes
        assert rebuilt.word_morph_ids == strategy.word_morph_ids

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            strategy_from_descriptor({"kind": "nope"})
