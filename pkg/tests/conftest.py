"""Shared generators for synthetic models, datasets, and corpora."""

from __future__ import annotations

import json

import numpy as np
import pytest

from topictree.corpus import Document
from topictree.ltm import LatentTreeModel
from topictree.vocab import BinaryDataset


def doc(doc_id: str, tokens, year: int = 2000, title: str = "") -> Document:
    return Document(doc_id, year, title or doc_id, tuple(tokens))


def random_cpt(rng: np.random.Generator) -> np.ndarray:
    p = rng.uniform(0.05, 0.95, size=2)
    return np.column_stack([1.0 - p, p])


def random_root(rng: np.random.Generator) -> np.ndarray:
    p = float(rng.uniform(0.1, 0.9))
    return np.array([1.0 - p, p])


def random_tree_model(rng: np.random.Generator) -> LatentTreeModel:
    """A small random model: an LCM, a two-level tree, or a chained top level."""
    shape = rng.integers(0, 3)
    parents: dict[str, str | None] = {}
    cpts: dict[str, np.ndarray] = {}
    word_tokens: dict[str, str] = {}
    latent_levels: dict[str, int] = {}

    def add_words(names, parent):
        for w in names:
            parents[w] = parent
            cpts[w] = random_cpt(rng)
            word_tokens[w] = w

    if shape == 0:
        # plain LCM
        k = int(rng.integers(2, 7))
        parents["Z1_1"] = None
        cpts["Z1_1"] = random_root(rng)
        latent_levels["Z1_1"] = 1
        add_words([f"w{i}" for i in range(k)], "Z1_1")
    elif shape == 1:
        # one root over two level-1 latents
        parents["Z2_1"] = None
        cpts["Z2_1"] = random_root(rng)
        latent_levels["Z2_1"] = 2
        at = 0
        for z in ("Z1_1", "Z1_2"):
            parents[z] = "Z2_1"
            cpts[z] = random_cpt(rng)
            latent_levels[z] = 1
            k = int(rng.integers(1, 4))
            add_words([f"w{i}" for i in range(at, at + k)], z)
            at += k
    else:
        # two top-level latents chained sideways, words split between them
        parents["Z1_1"] = None
        cpts["Z1_1"] = random_root(rng)
        parents["Z1_2"] = "Z1_1"
        cpts["Z1_2"] = random_cpt(rng)
        latent_levels["Z1_1"] = 1
        latent_levels["Z1_2"] = 1
        k1 = int(rng.integers(1, 4))
        k2 = int(rng.integers(1, 4))
        add_words([f"w{i}" for i in range(k1)], "Z1_1")
        add_words([f"w{i}" for i in range(k1, k1 + k2)], "Z1_2")
    return LatentTreeModel(parents, cpts, word_tokens, latent_levels)


def dataset_from_matrix(matrix: np.ndarray, names) -> BinaryDataset:
    return BinaryDataset.from_rows(matrix, list(names))


def two_block_dataset(seed: int, rows: int = 2000) -> tuple[BinaryDataset, list[set[str]]]:
    """Ten variables in two independent blocks of five, separation 0.9/0.1."""
    rng = np.random.default_rng(seed)
    z = rng.random((rows, 2)) < 0.5
    out = np.zeros((rows, 10), dtype=np.uint8)
    for b in range(2):
        p = np.where(z[:, b], 0.9, 0.1)[:, None]
        out[:, 5 * b:5 * b + 5] = rng.random((rows, 5)) < p
    names = [f"w{i}" for i in range(10)]
    blocks = [set(names[:5]), set(names[5:])]
    return dataset_from_matrix(out, names), blocks


def layered_dataset(seed: int, rows: int = 3000) -> BinaryDataset:
    """Data sampled from a three-level structure over 24 word variables.

    One top latent drives 2 mid latents, each mid latent drives 3 bottom
    latents, each bottom latent emits 4 words.
    """
    rng = np.random.default_rng(seed)
    top = rng.random(rows) < 0.5
    words = np.zeros((rows, 24), dtype=np.uint8)
    col = 0
    for m in range(2):
        mid = np.where(rng.random(rows) < np.where(top, 0.85, 0.15), 1, 0)
        for b in range(3):
            bottom = np.where(rng.random(rows) < np.where(mid == 1, 0.85, 0.15), 1, 0)
            p = np.where(bottom == 1, 0.9, 0.1)
            for _ in range(4):
                words[:, col] = rng.random(rows) < p
                col += 1
    names = [f"w{i:02d}" for i in range(24)]
    return dataset_from_matrix(words, names)


def synthetic_corpus(n_docs: int = 200, seed: int = 11) -> list[dict]:
    """JSONL-ready records with planted co-occurring word groups."""
    rng = np.random.default_rng(seed)
    themes = [
        ["neural", "network", "layers", "gradient"],
        ["bayesian", "inference", "posterior", "sampling"],
        ["graph", "vertex", "edges", "paths"],
        ["kernel", "margin", "support", "vectors"],
    ]
    fillers = ["method", "result", "study", "table", "figure", "score",
               "model", "training", "evaluation", "baseline"]
    records = []
    for i in range(n_docs):
        theme = themes[int(rng.integers(0, len(themes)))]
        words = []
        for w in theme:
            if rng.random() < 0.85:
                words += [w] * int(rng.integers(1, 3))
        picks = rng.choice(len(fillers), size=3, replace=False)
        words += [fillers[j] for j in picks]
        order = rng.permutation(len(words))
        records.append({
            "id": f"d{i:04d}",
            "year": 2005 + int(rng.integers(0, 12)),
            "title": f"Paper {i}",
            "text": " ".join(words[j] for j in order),
        })
    return records


def write_jsonl(records, path) -> None:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", "utf-8")


@pytest.fixture
def tiny_corpus_jsonl(tmp_path):
    records = synthetic_corpus(n_docs=60, seed=5)
    path = tmp_path / "corpus.jsonl"
    write_jsonl(records, path)
    return path
