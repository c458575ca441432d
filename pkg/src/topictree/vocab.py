"""Vocabulary construction: counting, tf-idf scoring, n-gram discovery, binarization.

The tf-idf variant used throughout divides the corpus-total term frequency by
the natural log of document frequency: score(w) = (sum_d tf(w, d)) / ln df(w).
It is undefined at df = 1, so a minimum-df filter (default 3) always runs
before scoring. A high-df cap removes tokens appearing in at least a fixed
fraction of documents (default 0.25, inclusive).

N-gram discovery grows the vocabulary pass by pass: pass n forms candidate
n-grams from consecutive token pairs that are both in the current vocabulary
and whose underlying word spans sum to exactly n, re-selects the top-M tokens
from old vocabulary plus candidates, then rewrites documents by replacing
selected pairs left to right without overlap. Both df filters are re-applied
every pass on the current document collection.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document

DF_CAP_DEFAULT = 0.25
MIN_DF_DEFAULT = 3


@dataclass(frozen=True)
class CorpusStats:
    """Raw counts over a document collection.

    tf maps token -> document id -> count; df maps token -> number of
    documents containing it. df is derived from tf at construction time.
    """

    tf: dict[str, dict[str, int]]
    df: dict[str, int]
    n_docs: int

    def total_tf(self, token: str) -> int:
        return sum(self.tf[token].values())


def compute_stats(corpus: Sequence[Document]) -> CorpusStats:
    if not corpus:
        raise ValueError("cannot compute statistics for an empty corpus")
    tf: dict[str, dict[str, int]] = defaultdict(dict)
    for doc in corpus:
        for token, count in Counter(doc.tokens).items():
            tf[token][doc.id] = count
    df = {token: len(per_doc) for token, per_doc in tf.items()}
    return CorpusStats(tf=dict(tf), df=df, n_docs=len(corpus))


def tfidf(token: str, stats: CorpusStats) -> float:
    """Corpus-total tf divided by ln(df). Rejects df < 2 (ln 1 = 0)."""
    if token not in stats.df:
        raise ValueError(f"unknown token {token!r}")
    df = stats.df[token]
    if df < 2:
        raise ValueError(f"tf-idf undefined for {token!r}: df = {df} < 2")
    return stats.total_tf(token) / math.log(df)


def filter_high_df(stats: CorpusStats, fraction: float = DF_CAP_DEFAULT) -> CorpusStats:
    """Drop every token whose df is at least fraction * n_docs (inclusive cut)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    cut = fraction * stats.n_docs
    kept = {token: per_doc for token, per_doc in stats.tf.items() if stats.df[token] < cut}
    return CorpusStats(tf=kept, df={t: stats.df[t] for t in kept}, n_docs=stats.n_docs)


@dataclass(frozen=True)
class Vocabulary:
    """Ordered distinct token strings; order is the canonical dataset column order."""

    tokens: tuple[str, ...]
    scores: tuple[float, ...] = ()
    token_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {token: i for i, token in enumerate(self.tokens)}
        if len(index) != len(self.tokens):
            raise ValueError("vocabulary tokens must be distinct")
        if self.scores and len(self.scores) != len(self.tokens):
            raise ValueError("scores length does not match tokens")
        object.__setattr__(self, "token_index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.token_index


def _score(total: int, df: int) -> float:
    return total / math.log(df)


def _select_top(
    counts: Mapping[str, tuple[int, int]],
    n_docs: int,
    vocab_size: int,
    df_cap: float,
    min_df: int,
) -> list[tuple[str, float]]:
    """Top-``vocab_size`` (token, score) pairs after both df filters.

    counts maps token -> (corpus-total tf, df). Ties in score break toward
    the lexicographically smaller token.
    """
    cut = df_cap * n_docs
    scored = [
        (token, _score(total, df))
        for token, (total, df) in counts.items()
        if df >= min_df and df < cut
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:vocab_size]


def find_ngrams(
    corpus: Sequence[Document],
    max_n: int = 3,
    vocab_size: int = 10000,
    *,
    df_cap: float = DF_CAP_DEFAULT,
    min_df: int = MIN_DF_DEFAULT,
) -> tuple[list[Document], Vocabulary]:
    """Select an n-gram vocabulary and rewrite documents to use it.

    Returns the transformed document list and the selected vocabulary,
    ordered by descending selection-time tf-idf (ties lexicographic).
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    if vocab_size < 1:
        raise ValueError(f"vocab_size must be >= 1, got {vocab_size}")
    if min_df < 2:
        raise ValueError(f"min_df must be >= 2, got {min_df}")

    docs = list(corpus)
    stats = compute_stats(docs)
    # span tracks how many underlying words each token covers; masking
    # underscores make the string itself unreliable for that.
    span = {token: 1 for token in stats.tf}

    counts = {token: (stats.total_tf(token), stats.df[token]) for token in stats.tf}
    selection = _select_top(counts, len(docs), vocab_size, df_cap, min_df)

    for n in range(2, max_n + 1):
        chosen = {token for token, _ in selection}
        cand_tf: dict[str, dict[str, int]] = defaultdict(dict)
        for doc in docs:
            toks = doc.tokens
            for t1, t2 in zip(toks, toks[1:]):
                if t1 in chosen and t2 in chosen and span[t1] + span[t2] == n:
                    gram = f"{t1}_{t2}"
                    if gram in span and span[gram] != n:
                        continue  # same string already exists with another span
                    per_doc = cand_tf[gram]
                    per_doc[doc.id] = per_doc.get(doc.id, 0) + 1
        for gram in cand_tf:
            span.setdefault(gram, n)

        counts = {}
        for token, _ in selection:
            if token in stats.tf:
                counts[token] = (stats.total_tf(token), stats.df[token])
        for gram, per_doc in cand_tf.items():
            if gram not in counts:
                counts[gram] = (sum(per_doc.values()), len(per_doc))
        selection = _select_top(counts, len(docs), vocab_size, df_cap, min_df)

        chosen = {token for token, _ in selection}
        docs = [
            Document(doc.id, doc.year, doc.title, tuple(_replace_pairs(doc.tokens, chosen, span, n)))
            for doc in docs
        ]
        stats = compute_stats(docs)

    vocab = Vocabulary(
        tokens=tuple(token for token, _ in selection),
        scores=tuple(score for _, score in selection),
    )
    return docs, vocab


def _replace_pairs(
    tokens: Sequence[str], chosen: set[str], span: Mapping[str, int], n: int
) -> list[str]:
    """Replace consecutive pairs forming a selected n-gram, left to right, no overlap."""
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if i + 1 < len(tokens):
            t1, t2 = tokens[i], tokens[i + 1]
            if span.get(t1, 0) + span.get(t2, 0) == n:
                gram = f"{t1}_{t2}"
                # the span check keeps a selected span-1 token that happens
                # to spell t1_t2 (underscores from masking) from merging pairs
                if gram in chosen and span.get(gram) == n:
                    out.append(gram)
                    i += 2
                    continue
        out.append(tokens[i])
        i += 1
    return out


@dataclass(frozen=True)
class BinaryDataset:
    """Presence/absence bit matrix with merged duplicate rows.

    Each row is a distinct bit pattern; weights[i] counts how many documents
    produced row i and doc_ids[i] lists them in corpus order. The weights sum
    to the number of documents. Columns follow vocabulary order.
    """

    vocabulary: Vocabulary
    matrix: np.ndarray
    weights: np.ndarray
    doc_ids: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        rows, cols = self.matrix.shape
        if cols != len(self.vocabulary):
            raise ValueError("matrix width does not match vocabulary size")
        if self.weights.shape != (rows,):
            raise ValueError("weights length does not match row count")
        if len(self.doc_ids) != rows:
            raise ValueError("doc_ids length does not match row count")
        if rows and int(self.weights.min()) < 1:
            raise ValueError("row weights must be >= 1")
        for weight, ids in zip(self.weights, self.doc_ids):
            if int(weight) != len(ids):
                raise ValueError("row weight must equal its document count")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.vocabulary.tokens

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_vars(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    def columns_for(self, names: Sequence[str]) -> np.ndarray:
        idx = [self.vocabulary.token_index[name] for name in names]
        return self.matrix[:, idx]

    @classmethod
    def from_rows(
        cls,
        matrix: np.ndarray,
        names: Sequence[str],
        weights: Sequence[int] | None = None,
        doc_ids: Sequence[Sequence[str]] | None = None,
    ) -> "BinaryDataset":
        """Build a dataset from raw 0/1 rows, merging identical bit patterns."""
        matrix = np.asarray(matrix, dtype=np.uint8)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        n = matrix.shape[0]
        if weights is None:
            weights = np.ones(n, dtype=np.int64)
        else:
            weights = np.asarray(weights, dtype=np.int64)
        if doc_ids is None:
            doc_ids = [(f"row{i}",) for i in range(n)]

        merged: dict[bytes, int] = {}
        rows: list[np.ndarray] = []
        out_weights: list[int] = []
        out_ids: list[list[str]] = []
        for i in range(n):
            key = matrix[i].tobytes()
            at = merged.get(key)
            if at is None:
                merged[key] = len(rows)
                rows.append(matrix[i])
                out_weights.append(int(weights[i]))
                out_ids.append(list(doc_ids[i]))
            else:
                out_weights[at] += int(weights[i])
                out_ids[at].extend(doc_ids[i])
        stacked = np.vstack(rows) if rows else np.zeros((0, len(names)), dtype=np.uint8)
        return cls(
            vocabulary=Vocabulary(tokens=tuple(names)),
            matrix=stacked,
            weights=np.asarray(out_weights, dtype=np.int64),
            doc_ids=tuple(tuple(ids) for ids in out_ids),
        )


def binarize(corpus: Sequence[Document], vocab: Vocabulary) -> BinaryDataset:
    """Presence/absence encoding of each document over the vocabulary."""
    matrix = np.zeros((len(corpus), len(vocab)), dtype=np.uint8)
    index = vocab.token_index
    for i, doc in enumerate(corpus):
        for token in doc.tokens:
            at = index.get(token)
            if at is not None:
                matrix[i, at] = 1
    return BinaryDataset.from_rows(matrix, vocab.tokens, doc_ids=[(doc.id,) for doc in corpus])


def write_token_data(docs: Sequence[Document], path: str | Path) -> None:
    """One line per document: id TAB space-joined tokens."""
    lines = [f"{doc.id}\t{' '.join(doc.tokens)}" for doc in docs]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def read_token_data(path: str | Path) -> list[tuple[str, list[str]]]:
    pairs: list[tuple[str, list[str]]] = []
    for i, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line:
            continue
        if "\t" not in line:
            raise ValueError(f"{path}: line {i}: expected id TAB tokens")
        doc_id, _, rest = line.partition("\t")
        pairs.append((doc_id, rest.split()))
    return pairs


def write_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """One line per token: token TAB tf-idf score, in vocabulary order."""
    scores = vocab.scores if vocab.scores else (float("nan"),) * len(vocab)
    lines = [f"{token}\t{score:.17g}" for token, score in zip(vocab.tokens, scores)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def read_vocabulary(path: str | Path) -> Vocabulary:
    tokens: list[str] = []
    scores: list[float] = []
    for i, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line:
            continue
        if "\t" not in line:
            raise ValueError(f"{path}: line {i}: expected token TAB score")
        token, _, score = line.partition("\t")
        tokens.append(token)
        scores.append(float(score))
    return Vocabulary(tokens=tuple(tokens), scores=tuple(scores))
