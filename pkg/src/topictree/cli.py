"""Command-line driver for the pipeline.

Subcommands mirror the pipeline stages: prepare (corpus to token data and
vocabulary), learn (token data to model), extract (model to catalog), and
all (the three in sequence with stage caching). Flags override config-file
values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .catalog import PipelineError, resolve_config, run_pipeline, stage_extract, stage_learn, stage_prepare


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workdir", help="directory for intermediate and output artifacts")
    parser.add_argument("--config", help="JSON config file; flags override its values")


def _add_prepare_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="corpus file (jsonl) or directory (txt)")
    parser.add_argument("--format", choices=("jsonl", "txt-dir"), help="corpus format (default jsonl)")
    parser.add_argument("--m", type=int, dest="max_ngram", help="largest n-gram length (default 3)")
    parser.add_argument("--vocab-size", type=int, help="tokens kept per selection pass (default 10000)")
    parser.add_argument("--df-cap", type=float, help="drop tokens in at least this fraction of docs (default 0.25)")
    parser.add_argument("--min-df", type=int, help="minimum document frequency (default 3)")
    parser.add_argument("--stopwords", help="stopword file overriding the built-in list")


def _add_learn_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument("--top-level-max", type=int, help="stop stacking at this many top latents (default 20)")
    parser.add_argument("--max-island-size", type=int, help="island growth cutoff (default 10)")
    parser.add_argument("--em-restarts", type=int, help="EM restarts per fit (default 4)")
    parser.add_argument("--em-max-iters", type=int, help="EM iteration cap (default 100)")
    parser.add_argument("--em-tolerance", type=float, help="EM relative convergence tolerance (default 1e-4)")
    parser.add_argument("--ud-threshold", type=float, help="unidimensionality BIC margin (default 3.0)")


def _add_extract_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--top-words", type=int, help="words characterizing each topic (default 7)")
    parser.add_argument("--name", help="corpus name recorded in the catalog (default: corpus stem)")
    parser.add_argument("--timestamp", help="fixed creation timestamp for reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topictree",
        description="Hierarchical topic detection over a document corpus.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_prepare = sub.add_parser("prepare", help="corpus -> token data and vocabulary")
    _add_common(p_prepare)
    _add_prepare_flags(p_prepare)

    p_learn = sub.add_parser("learn", help="token data -> latent tree model")
    _add_common(p_learn)
    _add_learn_flags(p_learn)

    p_extract = sub.add_parser("extract", help="model -> catalog JSON")
    _add_common(p_extract)
    _add_extract_flags(p_extract)
    # extract re-reads the corpus config for naming; accept prepare flags too
    p_extract.add_argument("--corpus", help=argparse.SUPPRESS)

    p_all = sub.add_parser("all", help="run prepare, learn, and extract with caching")
    _add_common(p_all)
    _add_prepare_flags(p_all)
    _add_learn_flags(p_all)
    _add_extract_flags(p_all)

    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text("utf-8")))
    skip = {"command", "config", "verbose"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        cfg[key] = value
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        if args.command == "all":
            catalog_path = run_pipeline(cfg)
            print(catalog_path)
            return 0
        resolved = resolve_config(cfg, need_corpus=args.command == "prepare")
        if args.command == "prepare":
            stage_prepare(resolved)
        elif args.command == "learn":
            stage_learn(resolved)
        elif args.command == "extract":
            print(stage_extract(resolved))
        return 0
    except PipelineError as exc:
        logging.getLogger("topictree").error("%s", exc)
        return 1
    except Exception as exc:  # surfaced as a one-line error, not a traceback
        logging.getLogger("topictree").error("%s: %s", type(exc).__name__, exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
