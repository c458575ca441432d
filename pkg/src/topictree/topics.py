"""Topic hierarchy extraction, document assignment, and trend estimation.

Every latent variable becomes one topic node. A topic is characterized by
the descendant word variables with the highest mutual information with the
latent, its size is the latent's marginal P(Z = 1), and its members are the
documents whose posterior P(Z = 1 | document) exceeds 0.5 strictly.

Descendants follow the hierarchy: a topic's children are the model's latent
children one level down, so chained top-level latents are siblings in the
forest, not ancestors of each other's subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document
from .ltm import LATENT, WORD, LatentTreeModel, mutual_information
from .vocab import BinaryDataset


@dataclass
class TopicNode:
    """One topic in the hierarchy, with per-document and per-year summaries."""

    latent_id: str
    level: int
    words: list[tuple[str, float]]
    size: float
    children: list["TopicNode"] = field(default_factory=list)
    doc_memberships: list[tuple[str, float]] = field(default_factory=list)
    yearly_counts: dict[int, int] = field(default_factory=dict)
    yearly_proportions: dict[int, float] = field(default_factory=dict)
    trend: float = 0.0
    trend_degenerate: bool = False
    proportion_trend: float = 0.0

    def walk(self) -> Iterable["TopicNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class TrendResult:
    """Regression slope of year on topic membership; degenerate when the
    membership indicator is constant over the corpus."""

    slope: float
    degenerate: bool


def hierarchy_children(model: LatentTreeModel, latent: str) -> list[str]:
    """Latent children one level down (chained same-level latents excluded)."""
    level = model.level(latent)
    return [
        child
        for child in model.children(latent)
        if model.nodes[child].kind == LATENT and model.level(child) == level - 1
    ]


def descendant_words(model: LatentTreeModel, latent: str) -> list[str]:
    """All word variables in the hierarchy subtree of a latent."""
    words: list[str] = []
    stack = [latent]
    while stack:
        name = stack.pop()
        if model.level(name) == 1:
            words.extend(
                child for child in model.children(name) if model.nodes[child].kind == WORD
            )
        stack.extend(reversed(hierarchy_children(model, name)))
    return words


def topic_size(model: LatentTreeModel, latent: str) -> float:
    return float(model.marginal(latent)[1])


def extract_hierarchy(model: LatentTreeModel, top_words: int = 7) -> list[TopicNode]:
    """Topic forest over all latents; roots are the top-level latents.

    Each topic's word list holds up to ``top_words`` descendant words sorted
    by decreasing MI with the latent, ties toward the smaller token.
    """
    if top_words < 1:
        raise ValueError(f"top_words must be >= 1, got {top_words}")

    def build(latent: str) -> TopicNode:
        scored = []
        for word in descendant_words(model, latent):
            mi = mutual_information(model.pairwise_marginal(latent, word))
            scored.append((model.token(word) or word, mi))
        scored.sort(key=lambda item: (-item[1], item[0]))
        return TopicNode(
            latent_id=latent,
            level=model.level(latent),
            words=scored[:top_words],
            size=topic_size(model, latent),
            children=[build(child) for child in hierarchy_children(model, latent)],
        )

    top = model.max_level
    return [build(z) for z in model.latent_nodes if model.level(z) == top]


def assign_documents(
    model: LatentTreeModel, data: BinaryDataset
) -> dict[str, list[tuple[str, float]]]:
    """Per-latent membership lists: documents with posterior strictly above 0.5.

    Lists are sorted by decreasing posterior, ties by ascending document id.
    """
    observed = model._observation_matrix(data)
    posterior = model.posterior_batch(observed)
    out: dict[str, list[tuple[str, float]]] = {}
    for at, latent in enumerate(model.latent_nodes):
        members: list[tuple[str, float]] = []
        for row in range(data.n_rows):
            p = float(posterior[row, at])
            if p > 0.5:
                members.extend((doc_id, p) for doc_id in data.doc_ids[row])
        members.sort(key=lambda item: (-item[1], item[0]))
        out[latent] = members
    return out


def _year_of(corpus: Sequence[Document]) -> dict[str, int]:
    return {doc.id: doc.year for doc in corpus}


def yearly_counts(
    memberships: Sequence[tuple[str, float]], corpus: Sequence[Document]
) -> dict[int, int]:
    """Member documents per year, zero-filled over the corpus year range."""
    if not corpus:
        return {}
    years = _year_of(corpus)
    lo = min(years.values())
    hi = max(years.values())
    counts = {year: 0 for year in range(lo, hi + 1)}
    for doc_id, _ in memberships:
        if doc_id not in years:
            raise ValueError(f"membership references unknown document {doc_id!r}")
        counts[years[doc_id]] += 1
    return counts


def yearly_proportion(
    memberships: Sequence[tuple[str, float]], corpus: Sequence[Document]
) -> dict[int, float]:
    """Members as a fraction of that year's corpus documents, for years present."""
    years = _year_of(corpus)
    totals: dict[int, int] = {}
    for doc in corpus:
        totals[doc.year] = totals.get(doc.year, 0) + 1
    members: dict[int, int] = {year: 0 for year in totals}
    for doc_id, _ in memberships:
        if doc_id not in years:
            raise ValueError(f"membership references unknown document {doc_id!r}")
        members[years[doc_id]] += 1
    return {year: members[year] / totals[year] for year in sorted(totals)}


def trend(
    memberships: Sequence[tuple[str, float]], corpus: Sequence[Document]
) -> TrendResult:
    """Least-squares slope of year regressed on the 0/1 membership indicator.

    Equals mean(year | member) - mean(year | non-member). When every document
    or no document is a member the slope is reported as 0 with the degenerate
    flag set.
    """
    years = _year_of(corpus)
    for doc_id, _ in memberships:
        if doc_id not in years:
            raise ValueError(f"membership references unknown document {doc_id!r}")
    member_ids = {doc_id for doc_id, _ in memberships}
    inside = [doc.year for doc in corpus if doc.id in member_ids]
    outside = [doc.year for doc in corpus if doc.id not in member_ids]
    if not inside or not outside:
        return TrendResult(slope=0.0, degenerate=True)
    slope = float(np.mean(inside) - np.mean(outside))
    return TrendResult(slope=slope, degenerate=False)


def proportion_trend(
    memberships: Sequence[tuple[str, float]], corpus: Sequence[Document]
) -> float:
    """Auxiliary summary: least-squares slope of yearly proportion on year.

    Returns 0.0 when fewer than two distinct years are present.
    """
    proportions = yearly_proportion(memberships, corpus)
    if len(proportions) < 2:
        return 0.0
    xs = np.array(sorted(proportions), dtype=np.float64)
    ys = np.array([proportions[int(x)] for x in xs])
    xc = xs - xs.mean()
    return float((xc @ (ys - ys.mean())) / (xc @ xc))


def build_topics(
    model: LatentTreeModel,
    data: BinaryDataset,
    corpus: Sequence[Document],
    *,
    top_words: int = 7,
) -> list[TopicNode]:
    """Topic forest with memberships, yearly tables, and trends filled in."""
    forest = extract_hierarchy(model, top_words)
    memberships = assign_documents(model, data)
    for root in forest:
        for node in root.walk():
            members = memberships[node.latent_id]
            node.doc_memberships = members
            node.yearly_counts = yearly_counts(members, corpus)
            node.yearly_proportions = yearly_proportion(members, corpus)
            estimate = trend(members, corpus)
            node.trend = estimate.slope
            node.trend_degenerate = estimate.degenerate
            node.proportion_trend = proportion_trend(members, corpus)
    return forest
