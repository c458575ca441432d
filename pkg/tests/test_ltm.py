"""Model construction, exact inference, rerooting, and the model file format."""

import math

import numpy as np
import pytest

from topictree.ltm import LatentTreeModel, ModelFormatError, mutual_information
from topictree.vocab import BinaryDataset

from conftest import random_tree_model
from oracles import (
    enumerate_joint,
    loglik_by_enumeration,
    marginal_by_enumeration,
    mi_from_joint,
    pairwise_by_enumeration,
    posterior_by_enumeration,
)


def lcm(prior1=0.5, word_probs=((0.2, 0.9),)):
    """Single latent over words; word_probs[i] = (P(w=1|z=0), P(w=1|z=1))."""
    parents = {"Z1_1": None}
    cpts = {"Z1_1": np.array([1 - prior1, prior1])}
    word_tokens = {}
    for i, (p0, p1) in enumerate(word_probs):
        name = f"w{i}"
        parents[name] = "Z1_1"
        cpts[name] = np.array([[1 - p0, p0], [1 - p1, p1]])
        word_tokens[name] = name
    return LatentTreeModel(parents, cpts, word_tokens, {"Z1_1": 1})


def two_level():
    parents = {"Z2_1": None, "Z1_1": "Z2_1", "Z1_2": "Z2_1",
               "w0": "Z1_1", "w1": "Z1_1", "w2": "Z1_2"}
    cpts = {
        "Z2_1": np.array([0.3, 0.7]),
        "Z1_1": np.array([[0.6, 0.4], [0.2, 0.8]]),
        "Z1_2": np.array([[0.9, 0.1], [0.35, 0.65]]),
        "w0": np.array([[0.8, 0.2], [0.25, 0.75]]),
        "w1": np.array([[0.7, 0.3], [0.15, 0.85]]),
        "w2": np.array([[0.95, 0.05], [0.4, 0.6]]),
    }
    word_tokens = {"w0": "w0", "w1": "w1", "w2": "w2"}
    levels = {"Z2_1": 2, "Z1_1": 1, "Z1_2": 1}
    return LatentTreeModel(parents, cpts, word_tokens, levels)


def observe_all(model):
    """Every word observation as a (2^k, k) array in word_nodes order."""
    k = len(model.word_nodes)
    rows = np.array([[(i >> j) & 1 for j in range(k)] for i in range(2 ** k)])
    return rows.astype(np.float64)


class TestMutualInformation:
    def test_perfect_correlation_is_ln_two(self):
        assert mutual_information([[0.5, 0.0], [0.0, 0.5]]) == pytest.approx(math.log(2), abs=1e-12)

    def test_partial_correlation(self):
        expected = 0.8 * math.log(1.6) + 0.2 * math.log(0.4)
        assert mutual_information([[0.4, 0.1], [0.1, 0.4]]) == pytest.approx(expected, abs=1e-12)

    def test_independent_is_zero(self):
        p = np.outer([0.3, 0.7], [0.6, 0.4])
        mi = mutual_information(p)
        assert 0.0 <= mi < 1e-12

    def test_agrees_with_plain_loop(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.random((2, 2))
            p /= p.sum()
            assert mutual_information(p) == pytest.approx(mi_from_joint(p), abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="2x2"):
            mutual_information(np.ones(4) / 4)
        with pytest.raises(ValueError, match="negative"):
            mutual_information([[0.6, -0.1], [0.3, 0.2]])
        with pytest.raises(ValueError, match="sums"):
            mutual_information([[0.5, 0.5], [0.5, 0.5]])


class TestConstruction:
    def test_rejects_two_roots(self):
        with pytest.raises(ValueError, match="root"):
            LatentTreeModel(
                {"Z1_1": None, "Z1_2": None},
                {"Z1_1": [0.5, 0.5], "Z1_2": [0.5, 0.5]},
                {},
                {"Z1_1": 1, "Z1_2": 1},
            )

    def test_rejects_cycle(self):
        parents = {"Z1_1": None, "a": "b", "b": "a", "w0": "Z1_1"}
        cpts = {
            "Z1_1": [0.5, 0.5],
            "a": [[0.5, 0.5], [0.5, 0.5]],
            "b": [[0.5, 0.5], [0.5, 0.5]],
            "w0": [[0.5, 0.5], [0.5, 0.5]],
        }
        with pytest.raises(ValueError, match="cycle|disconnection"):
            LatentTreeModel(parents, cpts, {"w0": "w0", "a": "a", "b": "b"}, {"Z1_1": 1})

    def test_rejects_word_root(self):
        with pytest.raises(ValueError):
            LatentTreeModel({"w0": None}, {"w0": [0.5, 0.5]}, {"w0": "w0"}, {})

    def test_rejects_childless_latent(self):
        parents = {"Z2_1": None, "Z1_1": "Z2_1", "Z1_2": "Z2_1", "w0": "Z1_1"}
        cpts = {
            "Z2_1": [0.5, 0.5],
            "Z1_1": [[0.5, 0.5], [0.5, 0.5]],
            "Z1_2": [[0.5, 0.5], [0.5, 0.5]],
            "w0": [[0.5, 0.5], [0.5, 0.5]],
        }
        with pytest.raises(ValueError, match="no children"):
            LatentTreeModel(parents, cpts, {"w0": "w0"}, {"Z2_1": 2, "Z1_1": 1, "Z1_2": 1})

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError, match="outside"):
            lcm(word_probs=((0.2, 1.5),))
        with pytest.raises(ValueError, match="sum to 1"):
            LatentTreeModel(
                {"Z1_1": None, "w0": "Z1_1"},
                {"Z1_1": [0.6, 0.5], "w0": [[0.5, 0.5], [0.5, 0.5]]},
                {"w0": "w0"},
                {"Z1_1": 1},
            )

    def test_rejects_level_gaps(self):
        parents = {"Z3_1": None, "Z1_1": "Z3_1", "w0": "Z1_1"}
        cpts = {
            "Z3_1": [0.5, 0.5],
            "Z1_1": [[0.5, 0.5], [0.5, 0.5]],
            "w0": [[0.5, 0.5], [0.5, 0.5]],
        }
        with pytest.raises(ValueError, match="level"):
            LatentTreeModel(parents, cpts, {"w0": "w0"}, {"Z3_1": 3, "Z1_1": 1})

    def test_top_level_chain_allowed(self):
        parents = {"Z1_1": None, "Z1_2": "Z1_1", "w0": "Z1_1", "w1": "Z1_2"}
        cpts = {
            "Z1_1": [0.5, 0.5],
            "Z1_2": [[0.7, 0.3], [0.2, 0.8]],
            "w0": [[0.5, 0.5], [0.5, 0.5]],
            "w1": [[0.5, 0.5], [0.5, 0.5]],
        }
        model = LatentTreeModel(parents, cpts, {"w0": "w0", "w1": "w1"}, {"Z1_1": 1, "Z1_2": 1})
        assert model.root == "Z1_1"

    def test_same_level_chain_below_top_rejected(self):
        parents = {
            "Z2_1": None, "Z1_1": "Z2_1", "Z1_2": "Z1_1",
            "w0": "Z1_1", "w1": "Z1_2",
        }
        cpts = {
            "Z2_1": [0.5, 0.5],
            "Z1_1": [[0.5, 0.5], [0.5, 0.5]],
            "Z1_2": [[0.5, 0.5], [0.5, 0.5]],
            "w0": [[0.5, 0.5], [0.5, 0.5]],
            "w1": [[0.5, 0.5], [0.5, 0.5]],
        }
        with pytest.raises(ValueError, match="level"):
            LatentTreeModel(parents, cpts, {"w0": "w0", "w1": "w1"}, {"Z2_1": 2, "Z1_1": 1, "Z1_2": 1})

    def test_missing_cpt(self):
        with pytest.raises(ValueError, match="no conditional table"):
            LatentTreeModel(
                {"Z1_1": None, "w0": "Z1_1"},
                {"Z1_1": [0.5, 0.5]},
                {"w0": "w0"},
                {"Z1_1": 1},
            )

    def test_unknown_parent(self):
        with pytest.raises(ValueError, match="unknown parent"):
            LatentTreeModel(
                {"Z1_1": None, "w0": "ghost"},
                {"Z1_1": [0.5, 0.5], "w0": [[0.5, 0.5], [0.5, 0.5]]},
                {"w0": "w0"},
                {"Z1_1": 1},
            )


class TestExactQuantities:
    def test_joint_sums_to_one(self):
        model = two_level()
        assert sum(enumerate_joint(model).values()) == pytest.approx(1.0, abs=1e-12)

    def test_marginal_hand_value(self):
        # P(Z1_1 = 1) = 0.3 * 0.4 + 0.7 * 0.8
        model = two_level()
        assert model.marginal("Z1_1")[1] == pytest.approx(0.68, abs=1e-12)

    def test_marginal_matches_enumeration(self):
        model = two_level()
        for name in model.nodes:
            expected = marginal_by_enumeration(model, name)
            np.testing.assert_allclose(model.marginal(name), expected, atol=1e-12)

    def test_pairwise_matches_enumeration(self):
        model = two_level()
        names = list(model.nodes)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                expected = pairwise_by_enumeration(model, a, b)
                np.testing.assert_allclose(model.pairwise_marginal(a, b), expected, atol=1e-12)

    def test_pairwise_rejects_same_variable(self):
        with pytest.raises(ValueError):
            two_level().pairwise_marginal("w0", "w0")

    def test_posterior_hand_value(self):
        # P(Z=1 | w=1) = 0.45 / 0.55
        model = lcm(prior1=0.5, word_probs=((0.2, 0.9),))
        post = model.posterior_latent({"w0": 1})
        assert post["Z1_1"] == pytest.approx(0.45 / 0.55, abs=1e-12)

    def test_posterior_matches_enumeration(self):
        model = two_level()
        for row in observe_all(model):
            observation = dict(zip(model.word_nodes, row.astype(int)))
            expected = posterior_by_enumeration(model, observation)
            got = model.posterior_latent(observation)
            for z in model.latent_nodes:
                assert got[z] == pytest.approx(expected[z], abs=1e-9)

    def test_posterior_random_models(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            model = random_tree_model(rng)
            rows = observe_all(model)
            batch = model.posterior_batch(rows)
            for r, row in enumerate(rows):
                observation = dict(zip(model.word_nodes, row.astype(int)))
                expected = posterior_by_enumeration(model, observation)
                for i, z in enumerate(model.latent_nodes):
                    assert batch[r, i] == pytest.approx(expected[z], abs=1e-9)

    def test_posterior_requires_all_words(self):
        model = two_level()
        with pytest.raises(ValueError, match="missing"):
            model.posterior_latent({"w0": 1})

    def test_posterior_rejects_non_binary(self):
        model = lcm()
        with pytest.raises(ValueError, match="0 or 1"):
            model.posterior_latent({"w0": 2})

    def test_log_likelihood_matches_enumeration(self):
        model = two_level()
        data = BinaryDataset.from_rows(
            np.array([[0, 1, 1], [1, 1, 0], [0, 0, 0], [1, 1, 0]]),
            [model.nodes[w].token for w in model.word_nodes],
        )
        assert model.log_likelihood(data) == pytest.approx(loglik_by_enumeration(model, data), abs=1e-9)

    def test_log_likelihood_impossible_row(self):
        model = lcm(word_probs=((1.0, 1.0),))  # w is always 1
        data = BinaryDataset.from_rows(np.array([[0]]), ["w0"])
        assert model.log_likelihood(data) == float("-inf")
        with pytest.raises(ValueError, match="probability 0"):
            model.posterior_batch(np.array([[0.0]]))

    def test_log_likelihood_rejects_wrong_variables(self):
        model = lcm()
        data = BinaryDataset.from_rows(np.array([[1]]), ["other"])
        with pytest.raises(ValueError, match="word nodes"):
            model.log_likelihood(data)

    def test_joint_requires_full_assignment(self):
        model = lcm()
        with pytest.raises(ValueError, match="missing"):
            model.joint_probability({"w0": 1})


class TestSampling:
    def test_deterministic_for_fixed_seed(self):
        model = two_level()
        w1, z1 = model.sample(100, np.random.default_rng(7))
        w2, z2 = model.sample(100, np.random.default_rng(7))
        assert np.array_equal(w1, w2) and np.array_equal(z1, z2)

    def test_empirical_marginals_converge(self):
        model = two_level()
        words, latents = model.sample(40000, np.random.default_rng(3))
        for i, w in enumerate(model.word_nodes):
            assert abs(words[:, i].mean() - model.marginal(w)[1]) < 0.02
        for i, z in enumerate(model.latent_nodes):
            assert abs(latents[:, i].mean() - model.marginal(z)[1]) < 0.02


class TestReroot:
    def test_joint_is_invariant(self):
        model = two_level()
        for target in model.latent_nodes:
            other = model.reroot(target)
            assert other.root == target
            for values, p in enumerate_joint(model).items():
                assignment = dict(zip(model.nodes, values))
                assert other.joint_probability(assignment) == pytest.approx(p, abs=1e-12)

    def test_posteriors_are_invariant(self):
        model = two_level()
        other = model.reroot("Z1_2")
        observation = {"w0": 1, "w1": 0, "w2": 1}
        a = model.posterior_latent(observation)
        b = other.posterior_latent(observation)
        for z in a:
            assert a[z] == pytest.approx(b[z], abs=1e-9)

    def test_reroot_at_word_rejected(self):
        with pytest.raises(ValueError, match="latent"):
            two_level().reroot("w0")

    def test_reroot_to_current_root_is_identity(self):
        model = two_level()
        assert model.reroot("Z2_1") is model


class TestModelFile:
    def test_round_trip_is_bit_exact(self, tmp_path):
        # thirds and tenths have no finite binary expansion; %.17g must hold them
        model = lcm(prior1=1 / 3, word_probs=((0.1, 0.9), (1 / 7, 2 / 3)))
        path = tmp_path / "model.txt"
        model.save(path)
        back = LatentTreeModel.load(path)
        assert back.root == model.root
        assert set(back.nodes) == set(model.nodes)
        for name in model.nodes:
            assert back.parent(name) == model.parent(name)
            assert back.level(name) == model.level(name)
            assert np.array_equal(back.cpt(name), model.cpt(name))

    def test_round_trip_two_level(self, tmp_path):
        model = two_level()
        path = tmp_path / "model.txt"
        model.save(path)
        back = LatentTreeModel.load(path)
        again = tmp_path / "again.txt"
        back.save(again)
        assert path.read_text() == again.read_text()

    @pytest.mark.parametrize("content,match", [
        ("", "empty"),
        ("other-format 1\n", "bad header"),
        ("topictree-model 9\nnodes 0 edges 0\n", "version"),
        ("topictree-model 1\n", "counts"),
        ("topictree-model 1\nnodes one edges 0\n", "counts"),
        ("topictree-model 1\nnodes 1 edges 0\nwhat Z1_1\n", "directive"),
        ("topictree-model 1\nnodes 2 edges 0\nnode Z1_1 latent 1\n", "expected 2 nodes"),
        (
            "topictree-model 1\nnodes 2 edges 2\nnode Z1_1 latent 1\nnode w0 word 0 w0\nedge w0 Z1_1\n",
            "expected 2 edges",
        ),
        (
            "topictree-model 1\nnodes 2 edges 1\nnode Z1_1 latent 1\nnode w0 word 0 w0\n"
            "edge w0 Z1_1\ncpt Z1_1 0.5 0.5 0.5\ncpt w0 0.5 0.5 0.5 0.5\n",
            "2 or 4 values",
        ),
        (
            "topictree-model 1\nnodes 2 edges 1\nnode Z1_1 latent x\n",
            "malformed",
        ),
    ])
    def test_malformed_files(self, tmp_path, content, match):
        path = tmp_path / "model.txt"
        path.write_text(content, "utf-8")
        with pytest.raises(ModelFormatError, match=match):
            LatentTreeModel.load(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFormatError, match="cannot read"):
            LatentTreeModel.load(tmp_path / "none.txt")

    def test_structural_errors_wrapped(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text(
            "topictree-model 1\nnodes 1 edges 0\nnode Z1_1 latent 1\ncpt Z1_1 0.5 0.5\n",
            "utf-8",
        )
        # a lone latent has no children, which the constructor rejects
        with pytest.raises(ModelFormatError, match="no children"):
            LatentTreeModel.load(path)
