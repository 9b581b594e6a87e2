#!/usr/bin/env python3
"""Regenerate the bundled desk-scale data files (deterministic).

Writes into src/morphgram/data/: a ~1 MB synthetic corpus whose content
words are stem+suffix composites, a full morpheme lexicon for them, a
30-pair similarity file (3 pairs deliberately out of vocabulary) and a
20-quadruple analogy file (2 quadruples out of vocabulary).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "morphgram" / "data"
SEED = 20240811
TARGET_BYTES = 1_000_000

ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
          "br", "dr", "gl", "kr", "pl", "tr"]
VOWELS = ["a", "e", "i", "o", "u"]
CODAS = ["", "n", "r", "l", "s", "m"]
SUFFIXES = ["", "s", "ed", "ing", "er", "ly", "ness", "ment"]
SUFFIX_PROBS = [0.35, 0.20, 0.12, 0.12, 0.07, 0.06, 0.04, 0.04]
FUNCTION_WORDS = ["the", "a", "of", "to", "in", "and", "on", "with", "for",
                  "is", "was", "as", "by", "at", "from", "it", "that", "this",
                  "or", "be", "are", "were", "not", "but", "we"]
N_STEMS = 60
N_TOPICS = 6


def make_stems(rng: np.random.Generator) -> list[str]:
    stems: list[str] = []
    seen = set(FUNCTION_WORDS)
    while len(stems) < N_STEMS:
        stem = (ONSETS[rng.integers(len(ONSETS))]
                + VOWELS[rng.integers(len(VOWELS))]
                + ONSETS[rng.integers(len(ONSETS))]
                + VOWELS[rng.integers(len(VOWELS))]
                + CODAS[rng.integers(len(CODAS))])
        if stem not in seen:
            seen.add(stem)
            stems.append(stem)
    return stems


def zipf_probs(n: int, alpha: float = 0.9) -> np.ndarray:
    weights = 1.0 / np.arange(1, n + 1) ** alpha
    return weights / weights.sum()


def main() -> None:
    rng = np.random.default_rng(SEED)
    stems = make_stems(rng)
    topics = [stems[t::N_TOPICS] for t in range(N_TOPICS)]
    topic_probs = [zipf_probs(len(t)) for t in topics]
    function_probs = zipf_probs(len(FUNCTION_WORDS), alpha=0.8)
    suffix_probs = np.array(SUFFIX_PROBS) / sum(SUFFIX_PROBS)

    OUT_DIR.mkdir(parents=True, exist_ok=True)

    lines = []
    size = 0
    while size < TARGET_BYTES:
        topic = int(rng.integers(N_TOPICS))
        length = int(rng.integers(6, 19))
        words = []
        for _ in range(length):
            if rng.random() < 0.4:
                words.append(FUNCTION_WORDS[rng.choice(len(FUNCTION_WORDS),
                                                       p=function_probs)])
            else:
                stem = topics[topic][rng.choice(len(topics[topic]),
                                                p=topic_probs[topic])]
                suffix = SUFFIXES[rng.choice(len(SUFFIXES), p=suffix_probs)]
                words.append(stem + suffix)
        line = " ".join(words) + "\n"
        lines.append(line)
        size += len(line.encode("utf-8"))
    corpus = OUT_DIR / "tiny_corpus.txt"
    corpus.write_text("".join(lines), encoding="utf-8")
    print(f"{corpus}: {size} bytes, {len(lines)} lines")

    lexicon = OUT_DIR / "tiny_lexicon.tsv"
    with open(lexicon, "w", encoding="utf-8") as fh:
        for stem in stems:
            for suffix in SUFFIXES:
                morphs = stem if not suffix else f"{stem} {suffix}"
                fh.write(f"{stem + suffix}\t{morphs}\n")
    print(f"{lexicon}: {N_STEMS * len(SUFFIXES)} entries")

    # 30 similarity pairs: same-topic pairs score high, cross-topic low;
    # the last 3 pairs contain out-of-vocabulary words on purpose.
    sim_lines = ["word1\tword2\tPOS\tscore"]
    for i in range(14):
        topic = topics[i % N_TOPICS]
        w1, w2 = topic[0], topic[1 + i % (len(topic) - 1)]
        score = 6.0 + 3.5 * float(rng.random())
        sim_lines.append(f"{w1}\t{w2}\tN\t{score:.2f}")
    for i in range(13):
        t1, t2 = i % N_TOPICS, (i + 1 + i % (N_TOPICS - 1)) % N_TOPICS
        w1, w2 = topics[t1][i % len(topics[t1])], topics[t2][(i * 2) % len(topics[t2])]
        score = 0.5 + 3.0 * float(rng.random())
        sim_lines.append(f"{w1}\t{w2}\tN\t{score:.2f}")
    sim_lines.append(f"{stems[0]}\tqzvwx\tN\t5.00")
    sim_lines.append(f"qqxj\t{stems[1]}\tN\t2.50")
    sim_lines.append("zzyqw\tqwzzy\tN\t1.00")
    similarity = OUT_DIR / "toy_similarity.tsv"
    similarity.write_text("\n".join(sim_lines) + "\n", encoding="utf-8")
    print(f"{similarity}: {len(sim_lines) - 1} pairs")

    # 20 analogy quadruples in two suffix categories; 2 use OOV words.
    ana_lines = [": suffix-s"]
    for i in range(10):
        a, c = stems[2 * i], stems[2 * i + 1]
        ana_lines.append(f"{a} {a}s {c} {c}s")
    ana_lines.append(": suffix-ing")
    for i in range(8):
        a, c = stems[3 * i], stems[3 * i + 2]
        ana_lines.append(f"{a} {a}ing {c} {c}ing")
    ana_lines.append("qzvwx qzvwxing zzyqw zzyqwing")
    ana_lines.append(f"{stems[5]} {stems[5]}ing qwzzy qwzzying")
    analogy = OUT_DIR / "toy_analogy.txt"
    analogy.write_text("\n".join(ana_lines) + "\n", encoding="utf-8")
    print(f"{analogy}: 20 quadruples")


if __name__ == "__main__":
    main()
