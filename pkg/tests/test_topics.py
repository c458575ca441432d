"""Topic extraction, document assignment, yearly tables, and trend slopes."""

import numpy as np
import pytest

from topictree.ltm import LatentTreeModel, mutual_information
from topictree.topics import (
    TopicNode,
    assign_documents,
    build_topics,
    descendant_words,
    extract_hierarchy,
    proportion_trend,
    trend,
    yearly_counts,
    yearly_proportion,
)
from topictree.vocab import BinaryDataset

from conftest import doc
from oracles import ols_slope, pairwise_by_enumeration


def two_level():
    parents = {"Z2_1": None, "Z1_1": "Z2_1", "Z1_2": "Z2_1",
               "w0": "Z1_1", "w1": "Z1_1", "w2": "Z1_2", "w3": "Z1_2"}
    cpts = {
        "Z2_1": np.array([0.4, 0.6]),
        "Z1_1": np.array([[0.85, 0.15], [0.2, 0.8]]),
        "Z1_2": np.array([[0.9, 0.1], [0.3, 0.7]]),
        "w0": np.array([[0.9, 0.1], [0.2, 0.8]]),
        "w1": np.array([[0.8, 0.2], [0.3, 0.7]]),
        "w2": np.array([[0.85, 0.15], [0.25, 0.75]]),
        "w3": np.array([[0.95, 0.05], [0.35, 0.65]]),
    }
    word_tokens = {f"w{i}": f"w{i}" for i in range(4)}
    return LatentTreeModel(parents, cpts, word_tokens, {"Z2_1": 2, "Z1_1": 1, "Z1_2": 1})


def chained_top():
    parents = {"Z1_1": None, "Z1_2": "Z1_1", "w0": "Z1_1", "w1": "Z1_2"}
    cpts = {
        "Z1_1": np.array([0.5, 0.5]),
        "Z1_2": np.array([[0.7, 0.3], [0.2, 0.8]]),
        "w0": np.array([[0.9, 0.1], [0.15, 0.85]]),
        "w1": np.array([[0.8, 0.2], [0.25, 0.75]]),
    }
    return LatentTreeModel(parents, cpts, {"w0": "w0", "w1": "w1"}, {"Z1_1": 1, "Z1_2": 1})


class TestTrend:
    def test_hand_value(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2001), doc("d2", [], 2014), doc("d3", [], 2015)]
        result = trend([("d2", 0.9), ("d3", 0.8)], corpus)
        assert result.slope == pytest.approx(14.0, abs=1e-9)
        assert not result.degenerate

    def test_matches_least_squares(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(4, 40))
            years = rng.integers(1990, 2020, size=n)
            member = rng.random(n) < 0.4
            if member.all() or not member.any():
                continue
            corpus = [doc(f"d{i}", [], int(years[i])) for i in range(n)]
            memberships = [(f"d{i}", 0.9) for i in range(n) if member[i]]
            got = trend(memberships, corpus).slope
            expected = ols_slope(member.astype(np.float64), years.astype(np.float64))
            assert got == pytest.approx(expected, abs=1e-9)

    def test_degenerate_when_everyone_is_a_member(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2001)]
        result = trend([("d0", 0.9), ("d1", 0.8)], corpus)
        assert result.degenerate and result.slope == 0.0

    def test_degenerate_when_nobody_is(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2001)]
        result = trend([], corpus)
        assert result.degenerate and result.slope == 0.0

    def test_unknown_member_rejected(self):
        with pytest.raises(ValueError, match="unknown document"):
            trend([("ghost", 0.9)], [doc("d0", [], 2000)])


class TestYearlyTables:
    def test_counts_zero_fill_the_range(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2003), doc("d2", [], 2003)]
        counts = yearly_counts([("d1", 0.8), ("d2", 0.7)], corpus)
        assert counts == {2000: 0, 2001: 0, 2002: 0, 2003: 2}

    def test_counts_empty_corpus(self):
        assert yearly_counts([], []) == {}

    def test_proportions_use_yearly_totals(self):
        corpus = [
            doc("d0", [], 2000), doc("d1", [], 2000),
            doc("d2", [], 2001), doc("d3", [], 2001), doc("d4", [], 2001),
        ]
        props = yearly_proportion([("d0", 0.9), ("d2", 0.8), ("d3", 0.7)], corpus)
        assert props == {2000: 0.5, 2001: 2 / 3}

    def test_proportions_skip_missing_years(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2005)]
        props = yearly_proportion([("d1", 0.9)], corpus)
        assert sorted(props) == [2000, 2005]

    def test_unknown_member_rejected(self):
        with pytest.raises(ValueError, match="unknown document"):
            yearly_counts([("ghost", 0.9)], [doc("d0", [], 2000)])


class TestProportionTrend:
    def test_hand_value(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2001)]
        assert proportion_trend([("d1", 0.9)], corpus) == pytest.approx(1.0, abs=1e-12)

    def test_single_year_is_zero(self):
        corpus = [doc("d0", [], 2000), doc("d1", [], 2000)]
        assert proportion_trend([("d0", 0.9)], corpus) == 0.0

    def test_matches_least_squares(self):
        rng = np.random.default_rng(8)
        corpus = [doc(f"d{i}", [], int(1995 + rng.integers(0, 6))) for i in range(60)]
        member = rng.random(60) < 0.5
        memberships = [(f"d{i}", 0.9) for i in range(60) if member[i]]
        props = yearly_proportion(memberships, corpus)
        xs = np.array(sorted(props), dtype=np.float64)
        ys = np.array([props[int(x)] for x in xs])
        assert proportion_trend(memberships, corpus) == pytest.approx(ols_slope(xs, ys), abs=1e-9)


class TestAssignDocuments:
    def test_strict_threshold_and_ordering(self):
        model = two_level()
        rows = np.array([
            [1, 1, 1, 1],
            [1, 1, 0, 0],
            [0, 0, 1, 1],
            [0, 0, 0, 0],
        ], dtype=np.uint8)
        data = BinaryDataset.from_rows(
            rows, ["w0", "w1", "w2", "w3"], doc_ids=[["a"], ["b"], ["c"], ["d"]]
        )
        memberships = assign_documents(model, data)
        posterior = model.posterior_batch(rows.astype(np.float64))
        for at, latent in enumerate(model.latent_nodes):
            expected = {
                data.doc_ids[r][0]: float(posterior[r, at])
                for r in range(4)
                if posterior[r, at] > 0.5
            }
            got = memberships[latent]
            assert {d for d, _ in got} == set(expected)
            ps = [p for _, p in got]
            assert ps == sorted(ps, reverse=True)

    def test_exact_half_is_excluded(self):
        parents = {"Z1_1": None, "w0": "Z1_1"}
        cpts = {
            "Z1_1": np.array([0.5, 0.5]),
            "w0": np.array([[0.6, 0.4], [0.6, 0.4]]),
        }
        model = LatentTreeModel(parents, cpts, {"w0": "w0"}, {"Z1_1": 1})
        data = BinaryDataset.from_rows(
            np.array([[1], [0]], dtype=np.uint8), ["w0"], doc_ids=[["a"], ["b"]]
        )
        assert assign_documents(model, data)["Z1_1"] == []

    def test_ties_sorted_by_document_id(self):
        model = two_level()
        rows = np.array([[1, 1, 1, 1]], dtype=np.uint8)
        data = BinaryDataset.from_rows(
            rows, ["w0", "w1", "w2", "w3"], weights=[3], doc_ids=[["z9", "a1", "m5"]]
        )
        memberships = assign_documents(model, data)
        for latent, members in memberships.items():
            if members:
                assert [d for d, _ in members] == ["a1", "m5", "z9"]


class TestHierarchy:
    def test_structure_follows_levels(self):
        forest = extract_hierarchy(two_level())
        assert [t.latent_id for t in forest] == ["Z2_1"]
        root = forest[0]
        assert root.level == 2
        assert sorted(c.latent_id for c in root.children) == ["Z1_1", "Z1_2"]
        assert all(c.children == [] for c in root.children)

    def test_chained_top_latents_are_siblings(self):
        forest = extract_hierarchy(chained_top())
        assert sorted(t.latent_id for t in forest) == ["Z1_1", "Z1_2"]
        assert all(t.children == [] for t in forest)
        by_id = {t.latent_id: t for t in forest}
        assert [w for w, _ in by_id["Z1_1"].words] == ["w0"]
        assert [w for w, _ in by_id["Z1_2"].words] == ["w1"]

    def test_descendant_words_cover_subtrees(self):
        model = two_level()
        assert sorted(descendant_words(model, "Z2_1")) == ["w0", "w1", "w2", "w3"]
        assert sorted(descendant_words(model, "Z1_1")) == ["w0", "w1"]

    def test_word_scores_are_mutual_information(self):
        model = two_level()
        forest = extract_hierarchy(model)
        root = forest[0]
        assert len(root.words) == 4
        scores = dict(root.words)
        for word in ["w0", "w1", "w2", "w3"]:
            joint = pairwise_by_enumeration(model, "Z2_1", word)
            assert scores[word] == pytest.approx(mutual_information(joint), abs=1e-9)
        mis = [mi for _, mi in root.words]
        assert mis == sorted(mis, reverse=True)

    def test_top_words_caps_the_list(self):
        forest = extract_hierarchy(two_level(), top_words=2)
        assert len(forest[0].words) == 2

    def test_top_words_validated(self):
        with pytest.raises(ValueError, match="top_words"):
            extract_hierarchy(two_level(), top_words=0)

    def test_size_is_latent_marginal(self):
        model = two_level()
        forest = extract_hierarchy(model)
        assert forest[0].size == pytest.approx(model.marginal("Z2_1")[1], abs=1e-12)


class TestBuildTopics:
    def test_fills_every_node(self):
        model = two_level()
        rng = np.random.default_rng(14)
        words, _ = model.sample(80, rng)
        years = [2000 + i % 5 for i in range(80)]
        ids = [[f"d{i:02d}"] for i in range(80)]
        data = BinaryDataset.from_rows(words, ["w0", "w1", "w2", "w3"], doc_ids=ids)
        corpus = [doc(f"d{i:02d}", [], years[i]) for i in range(80)]
        forest = build_topics(model, data, corpus, top_words=3)
        seen = [node for root in forest for node in root.walk()]
        assert {n.latent_id for n in seen} == {"Z2_1", "Z1_1", "Z1_2"}
        for node in seen:
            assert len(node.words) <= 3
            assert sum(node.yearly_counts.values()) == len(node.doc_memberships)
            assert sorted(node.yearly_counts) == list(range(2000, 2005))
            for p in node.yearly_proportions.values():
                assert 0.0 <= p <= 1.0
            if not node.trend_degenerate:
                assert np.isfinite(node.trend)
            else:
                assert node.trend == 0.0

    def test_walk_is_preorder(self):
        leaf_a = TopicNode("Z1_1", 1, [], 0.5)
        leaf_b = TopicNode("Z1_2", 1, [], 0.5)
        root = TopicNode("Z2_1", 2, [], 0.5, children=[leaf_a, leaf_b])
        assert [n.latent_id for n in root.walk()] == ["Z2_1", "Z1_1", "Z1_2"]
