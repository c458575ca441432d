"""Catalog assembly, JSON export, and the staged end-to-end pipeline.

The export is split for lazy loading: catalog.json holds metadata, the level
summary, the topic forest (words, sizes, trends, child nesting), and the
document table; per-topic membership lists and yearly tables live in
topics/<latent-id>.json. Every payload is validated against the schemas
below before it is written; docs/schema.md describes the format.

Serialization is deterministic: keys are sorted, floats use their shortest
round-trip form, and no wall-clock value enters the artifact unless the
caller leaves the timestamp unset and SOURCE_DATE_EPOCH is absent.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

import jsonschema

from .corpus import Document, load_corpus, load_stopwords
from .hlta import LearnConfig, learn
from .ltm import LatentTreeModel
from .topics import TopicNode, build_topics
from .vocab import (
    BinaryDataset,
    Vocabulary,
    binarize,
    find_ngrams,
    read_token_data,
    read_vocabulary,
    write_token_data,
    write_vocabulary,
)

logger = logging.getLogger(__name__)

FORMAT_NAME = "topictree-catalog"
FORMAT_VERSION = 1


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the stage and the cause."""


def display_token(token: str) -> str:
    """Raw tokens keep their underscores; displayed forms use hyphens."""
    return token.replace("_", "-")


_TOPIC_NODE_SCHEMA = {
    "type": "object",
    "required": [
        "id", "level", "size", "n_docs", "trend", "trend_degenerate",
        "proportion_trend", "words", "children",
    ],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "level": {"type": "integer", "minimum": 1},
        "size": {"type": "number", "minimum": 0, "maximum": 1},
        "n_docs": {"type": "integer", "minimum": 0},
        "trend": {"type": "number"},
        "trend_degenerate": {"type": "boolean"},
        "proportion_trend": {"type": "number"},
        "words": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["token", "display", "mi"],
                "additionalProperties": False,
                "properties": {
                    "token": {"type": "string", "minLength": 1},
                    "display": {"type": "string", "minLength": 1},
                    "mi": {"type": "number", "minimum": 0},
                },
            },
        },
        "children": {"type": "array", "items": {"$ref": "#/$defs/topic"}},
    },
}

CATALOG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "metadata", "levels", "topics", "documents"],
    "additionalProperties": False,
    "$defs": {"topic": _TOPIC_NODE_SCHEMA},
    "properties": {
        "format": {"const": FORMAT_NAME},
        "version": {"const": FORMAT_VERSION},
        "metadata": {
            "type": "object",
            "required": ["corpus_name", "n_docs", "vocab_size", "created", "seed", "config"],
            "additionalProperties": False,
            "properties": {
                "corpus_name": {"type": "string"},
                "n_docs": {"type": "integer", "minimum": 1},
                "vocab_size": {"type": "integer", "minimum": 1},
                "created": {"type": "string"},
                "seed": {"type": "integer"},
                "config": {"type": "object"},
            },
        },
        "levels": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
        "topics": {"type": "array", "items": {"$ref": "#/$defs/topic"}},
        "documents": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["title", "year"],
                "additionalProperties": False,
                "properties": {
                    "title": {"type": "string"},
                    "year": {"type": "integer"},
                },
            },
        },
    },
}

TOPIC_FILE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "id", "documents", "yearly_counts", "yearly_proportions",
        "trend", "trend_degenerate", "proportion_trend",
    ],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "documents": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "posterior"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "posterior": {"type": "number", "exclusiveMinimum": 0.5, "maximum": 1},
                },
            },
        },
        "yearly_counts": {
            "type": "object",
            "patternProperties": {"^-?[0-9]+$": {"type": "integer", "minimum": 0}},
            "additionalProperties": False,
        },
        "yearly_proportions": {
            "type": "object",
            "patternProperties": {"^-?[0-9]+$": {"type": "number", "minimum": 0, "maximum": 1}},
            "additionalProperties": False,
        },
        "trend": {"type": "number"},
        "trend_degenerate": {"type": "boolean"},
        "proportion_trend": {"type": "number"},
    },
}


@dataclass
class Catalog:
    """Everything the browsing layer needs, ready for export."""

    name: str
    n_docs: int
    vocab_size: int
    created: str
    seed: int
    config: dict[str, Any]
    topics: list[TopicNode]
    documents: dict[str, tuple[str, int]]  # id -> (title, year)

    @property
    def levels(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for root in self.topics:
            for node in root.walk():
                counts[node.level] = counts.get(node.level, 0) + 1
        return dict(sorted(counts.items()))

    def all_topics(self) -> list[TopicNode]:
        return [node for root in self.topics for node in root.walk()]


def build_catalog(
    model: LatentTreeModel,
    data: BinaryDataset,
    corpus: Sequence[Document],
    *,
    name: str,
    seed: int,
    config_echo: Mapping[str, Any],
    top_words: int = 7,
    created: str = "",
) -> Catalog:
    topics = build_topics(model, data, corpus, top_words=top_words)
    documents = {doc.id: (doc.title, doc.year) for doc in corpus}
    return Catalog(
        name=name,
        n_docs=len(corpus),
        vocab_size=len(data.vocabulary),
        created=created,
        seed=seed,
        config=dict(config_echo),
        topics=topics,
        documents=documents,
    )


def _topic_payload(node: TopicNode) -> dict[str, Any]:
    return {
        "id": node.latent_id,
        "level": node.level,
        "size": node.size,
        "n_docs": len(node.doc_memberships),
        "trend": node.trend,
        "trend_degenerate": node.trend_degenerate,
        "proportion_trend": node.proportion_trend,
        "words": [
            {"token": token, "display": display_token(token), "mi": mi}
            for token, mi in node.words
        ],
        "children": [_topic_payload(child) for child in node.children],
    }


def _topic_file_payload(node: TopicNode) -> dict[str, Any]:
    return {
        "id": node.latent_id,
        "documents": [
            {"id": doc_id, "posterior": posterior}
            for doc_id, posterior in node.doc_memberships
        ],
        "yearly_counts": {str(year): count for year, count in node.yearly_counts.items()},
        "yearly_proportions": {
            str(year): value for year, value in node.yearly_proportions.items()
        },
        "trend": node.trend,
        "trend_degenerate": node.trend_degenerate,
        "proportion_trend": node.proportion_trend,
    }


def catalog_payload(catalog: Catalog) -> dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "metadata": {
            "corpus_name": catalog.name,
            "n_docs": catalog.n_docs,
            "vocab_size": catalog.vocab_size,
            "created": catalog.created,
            "seed": catalog.seed,
            "config": catalog.config,
        },
        "levels": {str(level): count for level, count in catalog.levels.items()},
        "topics": [_topic_payload(root) for root in catalog.topics],
        "documents": {
            doc_id: {"title": title, "year": year}
            for doc_id, (title, year) in catalog.documents.items()
        },
    }


def _dump(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def export_catalog(catalog: Catalog, out_dir: str | Path) -> Path:
    """Write catalog.json and topics/<id>.json under out_dir.

    Payloads are schema-validated first, and membership document ids must
    all resolve in the document table; any violation aborts before writing.
    """
    all_topics = catalog.all_topics()
    for node in all_topics:
        for doc_id, _ in node.doc_memberships:
            if doc_id not in catalog.documents:
                raise ValueError(
                    f"topic {node.latent_id!r} references unknown document {doc_id!r}"
                )
    payload = catalog_payload(catalog)
    jsonschema.validate(payload, CATALOG_SCHEMA)
    topic_payloads = {}
    for node in all_topics:
        body = _topic_file_payload(node)
        jsonschema.validate(body, TOPIC_FILE_SCHEMA)
        topic_payloads[node.latent_id] = body

    out_dir = Path(out_dir)
    (out_dir / "topics").mkdir(parents=True, exist_ok=True)
    (out_dir / "catalog.json").write_text(_dump(payload), "utf-8")
    for latent_id, body in topic_payloads.items():
        (out_dir / "topics" / f"{latent_id}.json").write_text(_dump(body), "utf-8")
    return out_dir / "catalog.json"


def _node_from_payload(body: Mapping[str, Any]) -> TopicNode:
    return TopicNode(
        latent_id=body["id"],
        level=body["level"],
        words=[(w["token"], w["mi"]) for w in body["words"]],
        size=body["size"],
        children=[_node_from_payload(child) for child in body["children"]],
        trend=body["trend"],
        trend_degenerate=body["trend_degenerate"],
        proportion_trend=body["proportion_trend"],
    )


def load_catalog(path: str | Path) -> Catalog:
    """Read an exported catalog directory back into memory."""
    path = Path(path)
    if path.is_dir():
        path = path / "catalog.json"
    payload = json.loads(path.read_text("utf-8"))
    jsonschema.validate(payload, CATALOG_SCHEMA)
    topics = [_node_from_payload(body) for body in payload["topics"]]
    catalog = Catalog(
        name=payload["metadata"]["corpus_name"],
        n_docs=payload["metadata"]["n_docs"],
        vocab_size=payload["metadata"]["vocab_size"],
        created=payload["metadata"]["created"],
        seed=payload["metadata"]["seed"],
        config=payload["metadata"]["config"],
        topics=topics,
        documents={
            doc_id: (entry["title"], entry["year"])
            for doc_id, entry in payload["documents"].items()
        },
    )
    topics_dir = path.parent / "topics"
    for root in catalog.topics:
        for node in root.walk():
            body = json.loads((topics_dir / f"{node.latent_id}.json").read_text("utf-8"))
            jsonschema.validate(body, TOPIC_FILE_SCHEMA)
            node.doc_memberships = [(d["id"], d["posterior"]) for d in body["documents"]]
            node.yearly_counts = {int(y): c for y, c in body["yearly_counts"].items()}
            node.yearly_proportions = {
                int(y): v for y, v in body["yearly_proportions"].items()
            }
    return catalog


# -- staged pipeline -----------------------------------------------------------

_DEFAULTS: dict[str, Any] = {
    "format": "jsonl",
    "name": None,
    "stopwords": None,
    "max_ngram": 3,
    "vocab_size": 10000,
    "df_cap": 0.25,
    "min_df": 3,
    "top_words": 7,
    "seed": 0,
    "top_level_max": 20,
    "max_island_size": 10,
    "em_restarts": 4,
    "em_max_iters": 100,
    "em_tolerance": 1e-4,
    "ud_threshold": 3.0,
    "timestamp": None,
}

_MODEL_KEYS = (
    "max_ngram", "vocab_size", "df_cap", "min_df", "top_words", "seed",
    "top_level_max", "max_island_size", "em_restarts", "em_max_iters",
    "em_tolerance", "ud_threshold",
)


def resolve_config(
    config: Mapping[str, Any] | str | Path, *, need_corpus: bool = True
) -> dict[str, Any]:
    if isinstance(config, (str, Path)):
        config = json.loads(Path(config).read_text("utf-8"))
    if not isinstance(config, Mapping):
        raise PipelineError("pipeline config must be a mapping or a JSON file of one")
    cfg = dict(_DEFAULTS)
    cfg["corpus"] = None
    unknown = set(config) - set(cfg) - {"workdir"}
    if unknown:
        raise PipelineError(f"unknown pipeline config keys: {sorted(unknown)}")
    cfg.update(config)
    if not cfg.get("workdir"):
        raise PipelineError("pipeline config is missing 'workdir'")
    if need_corpus and not cfg.get("corpus"):
        raise PipelineError("pipeline config is missing 'corpus'")
    if cfg["name"] is None:
        source = cfg["corpus"] if cfg["corpus"] else cfg["workdir"]
        cfg["name"] = Path(source).stem
    return cfg


def _learn_config(cfg: Mapping[str, Any]) -> LearnConfig:
    return LearnConfig(
        max_island_size=cfg["max_island_size"],
        em_restarts=cfg["em_restarts"],
        em_max_iters=cfg["em_max_iters"],
        em_tolerance=cfg["em_tolerance"],
        ud_threshold=cfg["ud_threshold"],
        top_level_max=cfg["top_level_max"],
        seed=cfg["seed"],
    )


def _resolve_created(cfg: Mapping[str, Any]) -> str:
    if cfg.get("timestamp"):
        return str(cfg["timestamp"])
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        stamp = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        stamp = datetime.now(tz=timezone.utc)
    return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


def _corpus_fingerprint(cfg: Mapping[str, Any]) -> bytes:
    path = Path(cfg["corpus"])
    digest = hashlib.sha256()
    if path.is_dir():
        for name in sorted(p.name for p in path.iterdir() if p.is_file()):
            digest.update(name.encode())
            digest.update((path / name).read_bytes())
    else:
        digest.update(path.read_bytes())
    if cfg["stopwords"]:
        digest.update(Path(cfg["stopwords"]).read_bytes())
    return digest.digest()


def _params_blob(cfg: Mapping[str, Any], keys: Sequence[str]) -> bytes:
    return json.dumps({k: cfg[k] for k in keys}, sort_keys=True).encode()


def _hash(*parts: bytes) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part)
    return digest.hexdigest()


def _stage_is_fresh(workdir: Path, stage: str, fingerprint: str, outputs: Sequence[Path]) -> bool:
    marker = workdir / f".stage.{stage}.json"
    if not marker.is_file() or not all(p.exists() for p in outputs):
        return False
    try:
        return json.loads(marker.read_text("utf-8")).get("fingerprint") == fingerprint
    except (json.JSONDecodeError, OSError):
        return False


def _mark_stage(workdir: Path, stage: str, fingerprint: str) -> None:
    (workdir / f".stage.{stage}.json").write_text(
        json.dumps({"fingerprint": fingerprint}) + "\n", "utf-8"
    )


def stage_prepare(cfg: Mapping[str, Any]) -> None:
    """Corpus -> token data, vocabulary, and document table artifacts."""
    workdir = Path(cfg["workdir"])
    workdir.mkdir(parents=True, exist_ok=True)
    stopwords = load_stopwords(cfg["stopwords"]) if cfg["stopwords"] else None
    corpus = load_corpus(cfg["corpus"], cfg["format"], stopwords=stopwords)
    if not corpus:
        raise ValueError("corpus is empty")
    docs, vocab = find_ngrams(
        corpus,
        cfg["max_ngram"],
        cfg["vocab_size"],
        df_cap=cfg["df_cap"],
        min_df=cfg["min_df"],
    )
    write_token_data(docs, workdir / "token_data.tsv")
    write_vocabulary(vocab, workdir / "vocabulary.tsv")
    table = [{"id": d.id, "year": d.year, "title": d.title} for d in corpus]
    (workdir / "documents.json").write_text(_dump({"documents": table}), "utf-8")


def _read_prepared(workdir: Path) -> tuple[list[Document], Vocabulary]:
    meta = json.loads((workdir / "documents.json").read_text("utf-8"))["documents"]
    by_id = {row["id"]: row for row in meta}
    docs = []
    for doc_id, tokens in read_token_data(workdir / "token_data.tsv"):
        row = by_id[doc_id]
        docs.append(Document(doc_id, row["year"], row["title"], tuple(tokens)))
    return docs, read_vocabulary(workdir / "vocabulary.tsv")


def stage_learn(cfg: Mapping[str, Any]) -> None:
    """Prepared artifacts -> learned model file."""
    workdir = Path(cfg["workdir"])
    docs, vocab = _read_prepared(workdir)
    data = binarize(docs, vocab)
    model = learn(data, _learn_config(cfg))
    model.save(workdir / "model.txt")


def stage_extract(cfg: Mapping[str, Any]) -> Path:
    """Model plus prepared artifacts -> exported catalog directory."""
    workdir = Path(cfg["workdir"])
    docs, vocab = _read_prepared(workdir)
    data = binarize(docs, vocab)
    model = LatentTreeModel.load(workdir / "model.txt")
    kept = [n for n in data.variables if n in set(model.token(w) for w in model.word_nodes)]
    if len(kept) != data.n_vars:
        data = BinaryDataset.from_rows(
            data.columns_for(kept), kept, weights=data.weights, doc_ids=data.doc_ids
        )
    catalog = build_catalog(
        model,
        data,
        docs,
        name=cfg["name"],
        seed=cfg["seed"],
        config_echo={k: cfg[k] for k in _MODEL_KEYS},
        top_words=cfg["top_words"],
        created=_resolve_created(cfg),
    )
    return export_catalog(catalog, workdir / "catalog")


def run_pipeline(config: Mapping[str, Any] | str | Path) -> Path:
    """Run prepare -> learn -> extract with per-stage caching.

    Each stage records a fingerprint of its inputs; a stage re-runs only
    when the fingerprint changes or its outputs are missing. Any failure is
    wrapped in a PipelineError naming the stage.
    """
    cfg = resolve_config(config)
    workdir = Path(cfg["workdir"])
    workdir.mkdir(parents=True, exist_ok=True)

    try:
        corpus_fp = _corpus_fingerprint(cfg)
    except OSError as exc:
        raise PipelineError(f"stage 'prepare' failed: {exc}") from exc
    prepare_fp = _hash(
        corpus_fp,
        _params_blob(cfg, ("format", "max_ngram", "vocab_size", "df_cap", "min_df")),
    )
    prepare_outputs = [
        workdir / "token_data.tsv", workdir / "vocabulary.tsv", workdir / "documents.json",
    ]

    def run_stage(stage, fingerprint, outputs, action):
        if _stage_is_fresh(workdir, stage, fingerprint, outputs):
            logger.info("stage %s: up to date", stage)
            return
        logger.info("stage %s: running", stage)
        try:
            action(cfg)
        except Exception as exc:
            raise PipelineError(f"stage {stage!r} failed: {exc}") from exc
        _mark_stage(workdir, stage, fingerprint)

    run_stage("prepare", prepare_fp, prepare_outputs, stage_prepare)

    learn_fp = _hash(
        (workdir / "token_data.tsv").read_bytes(),
        (workdir / "vocabulary.tsv").read_bytes(),
        _params_blob(cfg, (
            "seed", "top_level_max", "max_island_size", "em_restarts",
            "em_max_iters", "em_tolerance", "ud_threshold",
        )),
    )
    run_stage("learn", learn_fp, [workdir / "model.txt"], stage_learn)

    extract_fp = _hash(
        (workdir / "model.txt").read_bytes(),
        (workdir / "token_data.tsv").read_bytes(),
        (workdir / "documents.json").read_bytes(),
        _params_blob(cfg, ("top_words", "name", "seed", "timestamp")),
    )
    run_stage(
        "extract",
        extract_fp,
        [workdir / "catalog" / "catalog.json"],
        stage_extract,
    )
    return workdir / "catalog" / "catalog.json"
