"""Command-line entry point: train and evaluate embedding models."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import evaluation, mapping, tagger, trainer
from .model import (
    EmbeddingModel,
    load_model,
    save_checkpoint,
    save_text,
)
from .segmenter import CharNgrams, MorphLexicon, WholeWord, load_lexicon

logger = logging.getLogger("morphgram")


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _str_list(text: str) -> list[str]:
    return [part for part in text.split(",") if part]


def _log_config(command: str, args: argparse.Namespace) -> None:
    resolved = {k: str(v) for k, v in sorted(vars(args).items())
                if k != "func"}
    logger.info("command=%s resolved config: %s", command,
                json.dumps(resolved, sort_keys=True))


def _require_files(parser: argparse.ArgumentParser, paths) -> None:
    for path in paths:
        if path is not None and not Path(path).exists():
            parser.error(f"input file not found: {path}")


def _emit(text: str, report: str | None) -> None:
    if report:
        Path(report).write_text(text, encoding="utf-8")
        logger.info("report written to %s", report)
    else:
        sys.stdout.write(text)


def _build_strategy(parser: argparse.ArgumentParser, args: argparse.Namespace):
    if args.model == "sg":
        return WholeWord()
    if args.model == "ft":
        try:
            return CharNgrams(n_min=args.ngram_min, n_max=args.ngram_max,
                              bucket_count=args.buckets)
        except ValueError as exc:
            parser.error(str(exc))
    if args.model == "morph":
        if not args.lexicon:
            parser.error("--lexicon is required when --model morph")
        _require_files(parser, [args.lexicon])
        return MorphLexicon(lexicon=load_lexicon(args.lexicon))
    parser.error(f"unknown model kind {args.model!r}")


def cmd_train(parser, args) -> int:
    _require_files(parser, args.corpus)
    strategy = _build_strategy(parser, args)
    try:
        config = trainer.TrainConfig(
            dim=args.dim, window=args.window, negatives=args.negatives,
            epochs=args.epochs, lr0=args.lr, subsample=args.subsample,
            min_count=args.min_count, max_vocab=args.max_vocab,
            seed=args.seed, workers=args.workers,
            table_len=args.table_len)
    except ValueError as exc:
        parser.error(str(exc))
    monitor = trainer.TrainMonitor()
    callback = None
    if args.per_epoch_checkpoints:
        def callback(epoch: int, model: EmbeddingModel) -> None:
            save_checkpoint(model, f"{args.out}.epoch{epoch}")
    model = trainer.train(args.corpus, strategy, config, monitor=monitor,
                          epoch_callback=callback)
    save_checkpoint(model, args.out)
    logger.info("checkpoint written to %s (loss ema %.6g -> %.6g over %d "
                "steps)", args.out, monitor.first_ema, monitor.last_ema,
                monitor.samples[-1][0])
    if args.save_text:
        save_text(model, args.save_text)
        logger.info("text vectors written to %s", args.save_text)
    return 0


def cmd_eval_sim(parser, args) -> int:
    _require_files(parser, [args.model, args.dataset])
    columns = args.columns
    if len(columns) != 3:
        parser.error("--columns needs exactly three indices: word1,word2,score")
    model = load_model(args.model)
    dataset = evaluation.load_similarity(args.dataset, columns=tuple(columns),
                                         skip_lines=args.skip_lines)
    rho, used, oov = evaluation.eval_similarity(model, dataset)
    _emit(evaluation.format_similarity_report(rho, used, oov), args.report)
    return 0


def _load_analogy(args) -> evaluation.AnalogyDataset:
    if args.format == "google":
        return evaluation.load_google_analogy(args.dataset)
    return evaluation.load_bats(args.dataset)


def cmd_eval_analogy(parser, args) -> int:
    _require_files(parser, [args.model, args.dataset])
    model = load_model(args.model)
    result = evaluation.eval_analogy(model, _load_analogy(args))
    _emit(evaluation.format_analogy_report(result), args.report)
    return 0


def cmd_map(parser, args) -> int:
    _require_files(parser, [args.source_emb, args.target_emb,
                            args.train_dict, args.test_dict])
    result = mapping.eval_mapping(
        load_model(args.source_emb), load_model(args.target_emb),
        mapping.load_dictionary(args.train_dict),
        mapping.load_dictionary(args.test_dict),
        k_values=args.k, normalize_steps=args.normalize)
    _emit(mapping.format_mapping_report(result), args.report)
    return 0


def cmd_tag_train(parser, args) -> int:
    _require_files(parser, [args.model, args.train])
    model = load_model(args.model)
    corpus = tagger.read_conll(args.train, label_column=args.label_column)
    params = tagger.train_tagger(corpus, model, epochs=args.epochs,
                                 lr=args.lr, window=args.window,
                                 hidden=args.hidden, seed=args.seed)
    params.save(args.out)
    logger.info("tagger parameters written to %s", args.out)
    return 0


def cmd_tag_eval(parser, args) -> int:
    _require_files(parser, [args.model, args.params, args.data])
    model = load_model(args.model)
    params = tagger.TaggerParams.load(args.params)
    corpus = tagger.read_conll(args.data, label_column=args.label_column)
    accuracy = tagger.evaluate_tagger(params, corpus, model)
    tokens = sum(len(t) for t, _ in corpus.sentences)
    _emit(f"accuracy\t{accuracy:.6f}\ntokens\t{tokens}\n", args.report)
    return 0


def cmd_compare(parser, args) -> int:
    _require_files(parser, args.models)
    _require_files(parser, [args.similarity, args.analogy])
    if not args.similarity and not args.analogy:
        parser.error("compare needs --similarity and/or --analogy")
    rows = ["model\tsim_rho\tsim_used\tsim_oov\tanalogy_micro"
            "\tanalogy_attempted\tanalogy_oov"]
    sim_dataset = None
    if args.similarity:
        sim_dataset = evaluation.load_similarity(
            args.similarity, columns=tuple(args.columns),
            skip_lines=args.skip_lines)
    analogy_dataset = None
    if args.analogy:
        analogy_dataset = (evaluation.load_google_analogy(args.analogy)
                           if args.format == "google"
                           else evaluation.load_bats(args.analogy))
    for path in args.models:
        model = load_model(path)
        sim = ("-",) * 3
        if sim_dataset is not None:
            rho, used, oov = evaluation.eval_similarity(model, sim_dataset)
            sim = (f"{rho:.6f}", str(used), str(oov))
        ana = ("-",) * 3
        if analogy_dataset is not None:
            result = evaluation.eval_analogy(model, analogy_dataset)
            ana = (f"{result.micro_accuracy:.6f}", str(result.attempted),
                   str(result.oov))
        rows.append("\t".join([str(path), *sim, *ana]))
    _emit("\n".join(rows) + "\n", args.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphgram",
        description="Train and evaluate subword-composition word embeddings")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train an embedding model")
    train.add_argument("--model", required=True, choices=["sg", "ft", "morph"])
    train.add_argument("--corpus", required=True, nargs="+",
                       help="UTF-8 text files, read in order")
    train.add_argument("--out", required=True, help="checkpoint output path")
    train.add_argument("--dim", type=int, default=300)
    train.add_argument("--window", type=int, default=5)
    train.add_argument("--negatives", type=int, default=5)
    train.add_argument("--epochs", type=int, default=5)
    train.add_argument("--lr", type=float, default=0.05)
    train.add_argument("--subsample", type=float, default=1e-4)
    train.add_argument("--min-count", type=int, default=5)
    train.add_argument("--max-vocab", type=int, default=100_000)
    train.add_argument("--seed", type=int, default=1)
    train.add_argument("--workers", type=int, default=1)
    train.add_argument("--table-len", type=int, default=10_000_000)
    train.add_argument("--ngram-min", type=int, default=3)
    train.add_argument("--ngram-max", type=int, default=6)
    train.add_argument("--buckets", type=int, default=2_000_000)
    train.add_argument("--lexicon", help="morpheme lexicon TSV (morph model)")
    train.add_argument("--save-text", help="also write word2vec text vectors")
    train.add_argument("--per-epoch-checkpoints", action="store_true")
    train.set_defaults(func=cmd_train)

    sim = sub.add_parser("eval-sim", help="word-similarity correlation")
    sim.add_argument("--model", required=True)
    sim.add_argument("--dataset", required=True)
    sim.add_argument("--columns", type=_int_list, default=[0, 1, 3],
                     help="word1,word2,score column indices")
    sim.add_argument("--skip-lines", type=int, default=1)
    sim.add_argument("--report")
    sim.set_defaults(func=cmd_eval_sim)

    ana = sub.add_parser("eval-analogy", help="analogy accuracy")
    ana.add_argument("--model", required=True)
    ana.add_argument("--dataset", required=True)
    ana.add_argument("--format", choices=["google", "bats"], default="google")
    ana.add_argument("--report")
    ana.set_defaults(func=cmd_eval_analogy)

    xmap = sub.add_parser("map", help="cross-lingual mapping precision")
    xmap.add_argument("--source-emb", required=True,
                      help="source embeddings (word2vec text or checkpoint)")
    xmap.add_argument("--target-emb", required=True)
    xmap.add_argument("--train-dict", required=True)
    xmap.add_argument("--test-dict", required=True)
    xmap.add_argument("--k", type=_int_list, default=[1, 10])
    xmap.add_argument("--normalize", type=_str_list,
                      default=list(mapping.DEFAULT_NORMALIZE))
    xmap.add_argument("--report")
    xmap.set_defaults(func=cmd_map)

    tag_train = sub.add_parser("tag-train", help="train the window tagger")
    tag_train.add_argument("--model", required=True)
    tag_train.add_argument("--train", required=True, help="CoNLL file")
    tag_train.add_argument("--label-column", type=int, default=1,
                           choices=[1, 2])
    tag_train.add_argument("--epochs", type=int, default=20)
    tag_train.add_argument("--lr", type=float, default=0.01)
    tag_train.add_argument("--window", type=int, default=5)
    tag_train.add_argument("--hidden", type=int, default=128)
    tag_train.add_argument("--seed", type=int, default=1)
    tag_train.add_argument("--out", required=True)
    tag_train.set_defaults(func=cmd_tag_train)

    tag_eval = sub.add_parser("tag-eval", help="token accuracy of a tagger")
    tag_eval.add_argument("--model", required=True)
    tag_eval.add_argument("--params", required=True)
    tag_eval.add_argument("--data", required=True)
    tag_eval.add_argument("--label-column", type=int, default=1,
                          choices=[1, 2])
    tag_eval.add_argument("--report")
    tag_eval.set_defaults(func=cmd_tag_eval)

    compare = sub.add_parser("compare",
                             help="evaluate several checkpoints side by side")
    compare.add_argument("--models", required=True, nargs="+")
    compare.add_argument("--similarity")
    compare.add_argument("--analogy")
    compare.add_argument("--format", choices=["google", "bats"],
                         default="google")
    compare.add_argument("--columns", type=_int_list, default=[0, 1, 3])
    compare.add_argument("--skip-lines", type=int, default=1)
    compare.add_argument("--report")
    compare.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _log_config(args.command, args)
        return args.func(parser, args)
    except SystemExit as exc:  # argparse errors carry exit code 2
        return int(exc.code or 0)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
