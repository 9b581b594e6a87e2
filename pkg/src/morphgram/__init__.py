"""Subword-composition word embeddings under one negative-sampling objective.

Three model kinds share the trainer: whole-word skip-gram, hashed character
n-grams and morpheme-lexicon composition. Evaluation covers word similarity,
analogies, cross-lingual mapping and window tagging.
"""

from .corpus import (
    CorpusStats,
    Vocabulary,
    build_vocab,
    keep_probability,
    load_corpus,
    tokenize,
)
from .model import (
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
from .segmenter import (
    CharNgrams,
    MorphLexicon,
    SubwordSet,
    WholeWord,
    char_ngrams,
    hash_subword,
    load_lexicon,
    segment,
)
from .trainer import (
    NegativeTable,
    TrainConfig,
    TrainMonitor,
    build_negative_table,
    sgns_loss,
    sgns_step,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "CharNgrams",
    "CorpusStats",
    "EmbeddingModel",
    "MorphLexicon",
    "NegativeTable",
    "SubwordSet",
    "TrainConfig",
    "TrainMonitor",
    "Vocabulary",
    "WholeWord",
    "build_negative_table",
    "build_vocab",
    "char_ngrams",
    "compose",
    "composed_matrix",
    "hash_subword",
    "keep_probability",
    "load_checkpoint",
    "load_corpus",
    "load_lexicon",
    "load_model",
    "load_text",
    "save_checkpoint",
    "save_text",
    "score",
    "segment",
    "sgns_loss",
    "sgns_step",
    "tokenize",
    "train",
]
