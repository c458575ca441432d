"""Level-by-level structure learning over binary datasets.

One level of learning partitions the current variables into unidimensional
islands, fits a latent class model per island, links the island latents with
a Chow-Liu tree over their mutual information, and projects every data row
onto hard latent assignments. The assignments become the dataset for the
next level; levels stack until few enough latents remain. The top level's
Chow-Liu tree is directed away from its highest-MI-degree latent, which
becomes the root of the final model.

All expectation-maximization runs are restarted, monotone in log-likelihood
(asserted at runtime), and seeded per work unit from the master seed, so
results are bit-reproducible regardless of scheduling.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import xlogy

from .ltm import LatentTreeModel
from .vocab import BinaryDataset

logger = logging.getLogger(__name__)

_MONOTONE_TOL = 1e-9

# seed-key phase tags keep every EM work unit on its own random stream
_PHASE_ISLAND = 0
_PHASE_UD_ONE = 1
_PHASE_UD_TWO = 2


@dataclass(frozen=True)
class LearnConfig:
    """Knobs for one full learning run. All sizes and limits must be positive."""

    max_island_size: int = 10
    em_restarts: int = 4
    em_max_iters: int = 100
    em_tolerance: float = 1e-4
    ud_threshold: float = 3.0
    top_level_max: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("max_island_size", "em_restarts", "em_max_iters", "top_level_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.em_tolerance <= 0 or self.ud_threshold <= 0:
            raise ValueError("em_tolerance and ud_threshold must be positive")
        if self.max_island_size < 2:
            raise ValueError("max_island_size must be at least 2")


@dataclass(frozen=True)
class Island:
    """A finalized island: one latent over its member variables.

    prior is the length-2 latent marginal; cpts maps each member to its 2x2
    table (row = latent state). State 1 is the minority state (prior at most
    0.5), with ties broken toward the state with higher mean member activation.
    """

    latent: str
    members: tuple[str, ...]
    prior: np.ndarray
    cpts: dict[str, np.ndarray]
    loglik: float


@dataclass(frozen=True)
class UDResult:
    """Outcome of a unidimensionality test; falsy when the test fails."""

    passed: bool
    bic_one: float
    bic_two: float
    split: tuple[tuple[str, ...], tuple[str, ...]]

    def __bool__(self) -> bool:
        return self.passed


def _seed_for(seed: int, key: Sequence[int]) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


def mi_matrix(matrix: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Pairwise empirical mutual information (nats) between binary columns."""
    x = np.asarray(matrix, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    total = float(w.sum())
    xw = x * w[:, None]
    n11 = x.T @ xw
    ones = xw.sum(axis=0)
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = total - n11 - n10 - n01
    joint = np.stack([np.stack([n00, n01], -1), np.stack([n10, n11], -1)], -2) / total
    pa = joint.sum(axis=-1)
    pb = joint.sum(axis=-2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log(joint) - np.log(pa[..., :, None]) - np.log(pb[..., None, :])
        terms = np.where(joint > 0, joint * ratio, 0.0)
    mi = terms.sum(axis=(-2, -1))
    np.fill_diagonal(mi, 0.0)
    return np.maximum(mi, 0.0)


def _patterns(data: BinaryDataset, members: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Distinct member-column patterns with merged weights."""
    sub = data.columns_for(members)
    keyed: dict[bytes, int] = {}
    rows: list[np.ndarray] = []
    weights: list[float] = []
    for i in range(sub.shape[0]):
        key = sub[i].tobytes()
        at = keyed.get(key)
        if at is None:
            keyed[key] = len(rows)
            rows.append(sub[i])
            weights.append(float(data.weights[i]))
        else:
            weights[at] += float(data.weights[i])
    return np.asarray(rows, dtype=np.float64), np.asarray(weights)


def _check_monotone(ll: float, prev: float) -> None:
    if ll < prev - _MONOTONE_TOL:
        raise RuntimeError(f"EM log-likelihood decreased: {prev} -> {ll}")


def _member_loglik(x: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Per-row log-likelihood of the members under each latent state, (rows, 2).

    p1[z, i] = P(member i = 1 | z). xlogy keeps 0 * log(0) at 0, so hard
    parameters from an M-step cannot poison the scores with NaN.
    """
    xs = x[:, None, :]
    return (xlogy(xs, p1[None]) + xlogy(1.0 - xs, 1.0 - p1[None])).sum(axis=2)


def _em_lcm(
    x: np.ndarray, w: np.ndarray, rng: np.random.Generator, config: LearnConfig
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """EM for a single-latent class model over binary members.

    Returns (prior, p1, loglik, trace) where p1[z, i] = P(member i = 1 | z).
    """
    k = x.shape[1]
    p1 = rng.uniform(0.1, 0.9, size=(2, k))
    prior = np.array([0.0, rng.uniform(0.25, 0.75)])
    prior[0] = 1.0 - prior[1]
    trace: list[float] = []
    prev = -np.inf
    for _ in range(config.em_max_iters):
        with np.errstate(divide="ignore"):
            log_prior = np.log(prior)
        score = log_prior[None, :] + _member_loglik(x, p1)
        norm = np.logaddexp(score[:, 0], score[:, 1])
        ll = float(w @ norm)
        _check_monotone(ll, prev)
        trace.append(ll)
        if trace[:-1] and ll - prev <= config.em_tolerance * max(1.0, abs(prev)):
            return prior, p1, ll, trace
        prev = ll
        post1 = np.exp(score[:, 1] - norm)
        post0 = np.exp(score[:, 0] - norm)
        w1, w0 = w * post1, w * post0
        t1, t0 = float(w1.sum()), float(w0.sum())
        new_p1 = np.array([
            (x.T @ w0) / t0 if t0 > 0 else p1[0],
            (x.T @ w1) / t1 if t1 > 0 else p1[1],
        ])
        # summation order can push a mean of 0/1 values past 1 by an ulp
        p1 = np.clip(new_p1, 0.0, 1.0)
        prior = np.array([t0 / (t0 + t1), 0.0])
        prior[1] = 1.0 - prior[0]
    # parameters moved after the last recorded value; evaluate them once more
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior)
    score = log_prior[None, :] + _member_loglik(x, p1)
    ll = float(w @ np.logaddexp(score[:, 0], score[:, 1]))
    _check_monotone(ll, prev)
    trace.append(ll)
    return prior, p1, ll, trace


def _fit_lcm(
    x: np.ndarray, w: np.ndarray, config: LearnConfig, key: Sequence[int]
) -> tuple[np.ndarray, np.ndarray, float]:
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for restart in range(config.em_restarts):
        rng = _seed_for(config.seed, [*key, restart])
        prior, p1, ll, _ = _em_lcm(x, w, rng, config)
        if best is None or ll > best[2]:
            best = (prior, p1, ll)
    assert best is not None
    return best


def _em_two_latent(
    x1: np.ndarray,
    x2: np.ndarray,
    w: np.ndarray,
    rng: np.random.Generator,
    config: LearnConfig,
) -> float:
    """EM log-likelihood for two linked latents, one per member group."""
    k1, k2 = x1.shape[1], x2.shape[1]
    p1a = rng.uniform(0.1, 0.9, size=(2, k1))
    p1b = rng.uniform(0.1, 0.9, size=(2, k2))
    prior = np.array([0.0, rng.uniform(0.25, 0.75)])
    prior[0] = 1.0 - prior[1]
    trans = rng.uniform(0.2, 0.8, size=(2, 1))  # P(Zb = 1 | Za)
    trans = np.hstack([1.0 - trans, trans])
    prev = -np.inf
    ll = -np.inf
    for _ in range(config.em_max_iters):
        with np.errstate(divide="ignore"):
            log_prior = np.log(prior)
            log_trans = np.log(trans)
        la = _member_loglik(x1, p1a)
        lb = _member_loglik(x2, p1b)
        score = (
            log_prior[None, :, None]
            + log_trans[None, :, :]
            + la[:, :, None]
            + lb[:, None, :]
        )
        flat = score.reshape(-1, 4)
        top = flat.max(axis=1)
        norm = top + np.log(np.exp(flat - top[:, None]).sum(axis=1))
        ll = float(w @ norm)
        _check_monotone(ll, prev)
        if prev > -np.inf and ll - prev <= config.em_tolerance * max(1.0, abs(prev)):
            return ll
        prev = ll
        post = np.exp(score - norm[:, None, None])  # (rows, za, zb)
        wp = post * w[:, None, None]
        za = wp.sum(axis=2)  # (rows, 2)
        zb = wp.sum(axis=1)
        ta = za.sum(axis=0)
        tb = zb.sum(axis=0)
        tab = wp.sum(axis=0)  # (2, 2)
        prior = np.array([ta[0] / ta.sum(), 0.0])
        prior[1] = 1.0 - prior[0]
        trans = np.where(ta[:, None] > 0, tab / np.where(ta[:, None] > 0, ta[:, None], 1.0), trans)
        trans = trans / trans.sum(axis=1, keepdims=True)
        p1a = np.clip(np.array([
            (x1.T @ za[:, 0]) / ta[0] if ta[0] > 0 else p1a[0],
            (x1.T @ za[:, 1]) / ta[1] if ta[1] > 0 else p1a[1],
        ]), 0.0, 1.0)
        p1b = np.clip(np.array([
            (x2.T @ zb[:, 0]) / tb[0] if tb[0] > 0 else p1b[0],
            (x2.T @ zb[:, 1]) / tb[1] if tb[1] > 0 else p1b[1],
        ]), 0.0, 1.0)
    return ll


def _bic(ll: float, n_params: int, total_weight: float) -> float:
    return ll - 0.5 * n_params * math.log(total_weight)


def _candidate_splits(
    members: Sequence[str], mi: np.ndarray
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Bisections to score in the unidimensionality test.

    For four members every bisection is scored. Beyond that the search is
    guided: the minimum-MI pair anchors a two-sided assignment by nearest
    anchor, and the most recently added member is also tried alone.
    """
    k = len(members)
    if k == 4:
        splits = []
        for r in (1, 2, 3):
            for combo in combinations(range(1, 4), r):
                side2 = tuple(combo)
                side1 = tuple(i for i in range(4) if i not in side2)
                splits.append((side1, side2))
        # unordered bisections: (a, b) duplicates (b, a); keep first occurrences
        seen = set()
        out = []
        for side1, side2 in splits:
            key = frozenset((side1, side2))
            if key not in seen:
                seen.add(key)
                out.append((side1, side2))
        return out

    pairs = [(mi[i, j], i, j) for i in range(k) for j in range(i + 1, k)]
    _, a, b = min(pairs, key=lambda t: (t[0], t[1], t[2]))
    side_a, side_b = [a], [b]
    for i in range(k):
        if i in (a, b):
            continue
        (side_a if mi[i, a] >= mi[i, b] else side_b).append(i)
    anchored = (tuple(sorted(side_a)), tuple(sorted(side_b)))
    newest = (tuple(range(k - 1)), (k - 1,))
    splits = [anchored]
    if frozenset(newest) != frozenset(anchored):
        splits.append(newest)
    return splits


def unidimensionality_test(
    members: Sequence[str],
    data: BinaryDataset,
    config: LearnConfig,
    *,
    seed_key: Sequence[int] = (),
) -> UDResult:
    """BIC comparison of the best one-latent model against two linked latents.

    Fails (returns a falsy result) when the best two-latent tree model beats
    the one-latent model by more than config.ud_threshold in BIC.
    """
    if len(members) < 4:
        raise ValueError("the unidimensionality test needs at least four members")
    x, w = _patterns(data, members)
    total = float(w.sum())
    k = len(members)

    _, _, ll_one = _fit_lcm(x, w, config, [_PHASE_UD_ONE, *seed_key])
    bic_one = _bic(ll_one, 1 + 2 * k, total)

    mi = mi_matrix(x, w)
    best_two = -np.inf
    best_split: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for c, (side1, side2) in enumerate(_candidate_splits(members, mi)):
        x1, x2 = x[:, list(side1)], x[:, list(side2)]
        ll_two = -np.inf
        for restart in range(config.em_restarts):
            rng = _seed_for(config.seed, [*(_PHASE_UD_TWO, *seed_key), c, restart])
            ll_two = max(ll_two, _em_two_latent(x1, x2, w, rng, config))
        bic_two = _bic(ll_two, 3 + 2 * k, total)
        if bic_two > best_two:
            best_two = bic_two
            best_split = (side1, side2)
    assert best_split is not None
    split = (
        tuple(members[i] for i in best_split[0]),
        tuple(members[i] for i in best_split[1]),
    )
    return UDResult(
        passed=bool(best_two - bic_one <= config.ud_threshold),
        bic_one=bic_one,
        bic_two=best_two,
        split=split,
    )


def learn_lcm(
    members: Sequence[str],
    data: BinaryDataset,
    config: LearnConfig,
    *,
    name: str = "Z1_1",
    seed_key: Sequence[int] = (),
) -> Island:
    """Fit a latent class model over the given members, best of several restarts."""
    if len(members) < 2:
        raise ValueError("an island needs at least two members")
    x, w = _patterns(data, members)
    prior, p1, ll = _fit_lcm(x, w, config, [_PHASE_ISLAND, *seed_key])
    if prior[1] > 0.5 or (prior[1] == 0.5 and p1[1].mean() < p1[0].mean()):
        prior = prior[::-1].copy()
        p1 = p1[::-1].copy()
    cpts = {}
    for i, member in enumerate(members):
        cpts[member] = np.array([
            [1.0 - p1[0, i], p1[0, i]],
            [1.0 - p1[1, i], p1[1, i]],
        ])
    return Island(latent=name, members=tuple(members), prior=prior, cpts=cpts, loglik=ll)


def build_islands(
    variables: Sequence[str],
    data: BinaryDataset,
    config: LearnConfig,
    *,
    level: int = 1,
) -> list[Island]:
    """Partition the variables into unidimensional islands and fit each one.

    Greedy growth: seed with the highest-MI pair, repeatedly pull in the
    outside variable with the highest MI to any member, and from the fourth
    member on check unidimensionality after every addition. On failure the
    island is cut back to the best-bisection side holding the seed pair and
    the rest return to the pool; at max_island_size it is finalized as is.
    A final leftover variable joins its highest-MI island.
    """
    variables = tuple(variables)
    if tuple(data.variables) != variables:
        raise ValueError("dataset variables must match the requested variable order")
    if len(variables) < 2:
        raise ValueError("island construction needs at least two variables")
    mi = mi_matrix(data.matrix, data.weights)
    index = {v: i for i, v in enumerate(variables)}

    unassigned = list(range(len(variables)))
    clusters: list[list[int]] = []
    while len(unassigned) >= 2:
        pair = max(
            ((mi[i, j], -i, -j, i, j) for i, j in combinations(unassigned, 2)),
            key=lambda t: t[:3],
        )
        a, b = pair[3], pair[4]
        cluster = [a, b]
        seed_pair = (a, b)
        pool = [i for i in unassigned if i not in cluster]
        while pool:
            gain = [(max(mi[i, c] for c in cluster), -i, i) for i in pool]
            x = max(gain, key=lambda t: t[:2])[2]
            cluster.append(x)
            pool.remove(x)
            if len(cluster) >= 4:
                result = unidimensionality_test(
                    [variables[i] for i in cluster],
                    data,
                    config,
                    seed_key=[level, len(clusters), len(cluster)],
                )
                if not result:
                    keep = _seed_side(result.split, variables, seed_pair)
                    cluster = [i for i in cluster if variables[i] in keep]
                    break
            if len(cluster) >= config.max_island_size:
                break
        clusters.append(cluster)
        taken = set(cluster)
        unassigned = [i for i in unassigned if i not in taken]

    if len(unassigned) == 1:
        lone = unassigned[0]
        scores = [
            (max(mi[lone, c] for c in cluster), -at, at)
            for at, cluster in enumerate(clusters)
        ]
        best = max(scores, key=lambda t: t[:2])[2]
        clusters[best].append(lone)

    islands = []
    for at, cluster in enumerate(clusters):
        islands.append(
            learn_lcm(
                [variables[i] for i in cluster],
                data,
                config,
                name=f"Z{level}_{at + 1}",
                seed_key=[level, at],
            )
        )
    return islands


def _seed_side(
    split: tuple[tuple[str, ...], ...], variables: tuple[str, ...], seed_pair: tuple[int, int]
) -> set[str]:
    seeds = {variables[seed_pair[0]], variables[seed_pair[1]]}
    side1, side2 = set(split[0]), set(split[1])
    hits1, hits2 = len(seeds & side1), len(seeds & side2)
    if hits1 > hits2:
        return side1
    if hits2 > hits1:
        return side2
    return side1 if variables[seed_pair[0]] in side1 else side2


def _island_assignments(islands: Sequence[Island], data: BinaryDataset) -> np.ndarray:
    """Hard assignments from each island's own model, columns in island order."""
    out = np.zeros((data.n_rows, len(islands)), dtype=np.uint8)
    for at, island in enumerate(islands):
        x = data.columns_for(island.members).astype(np.float64)
        p1 = np.stack([island.cpts[m][:, 1] for m in island.members], axis=1)  # (2, k)
        with np.errstate(divide="ignore"):
            log_prior = np.log(island.prior)
        score = log_prior[None, :] + _member_loglik(x, p1)
        out[:, at] = (score[:, 1] > score[:, 0]).astype(np.uint8)
    return out


def link_islands(
    islands: Sequence[Island], data: BinaryDataset
) -> list[tuple[str, str, float]]:
    """Chow-Liu tree over island latents.

    MI between latents is estimated from their hard assignments on the data.
    Returns maximum-spanning-tree edges as (latent a, latent b, MI) triples.
    """
    if len(islands) < 2:
        return []
    assignments = _island_assignments(islands, data)
    mi = mi_matrix(assignments, data.weights)
    return _max_spanning_tree([island.latent for island in islands], mi)


def _max_spanning_tree(names: Sequence[str], mi: np.ndarray) -> list[tuple[str, str, float]]:
    """Kruskal with deterministic tie-breaking by (weight, index, index)."""
    k = len(names)
    edges = sorted(
        ((mi[i, j], i, j) for i in range(k) for j in range(i + 1, k)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    out: list[tuple[str, str, float]] = []
    for weight, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append((names[i], names[j], float(weight)))
            if len(out) == k - 1:
                break
    return out


def _level_model(
    islands: Sequence[Island],
    edges: Sequence[tuple[str, str, float]],
    data: BinaryDataset,
) -> LatentTreeModel:
    """One level as a standalone model: islands plus the directed Chow-Liu links.

    The root is the latent with the highest MI degree (sum of incident edge
    weights, ties toward the smaller name). The root keeps its island prior;
    every other latent gets an add-one-smoothed conditional estimated from
    the island hard assignments.
    """
    degree: dict[str, float] = {island.latent: 0.0 for island in islands}
    neighbors: dict[str, list[str]] = {island.latent: [] for island in islands}
    for a, b, weight in edges:
        degree[a] += weight
        degree[b] += weight
        neighbors[a].append(b)
        neighbors[b].append(a)
    # max by degree, lexicographically smallest name on ties
    root = sorted(degree, key=lambda name: (-degree[name], name))[0]

    latent_parent: dict[str, str | None] = {root: None}
    order = [root]
    queue = [root]
    while queue:
        here = queue.pop(0)
        for there in neighbors[here]:
            if there not in latent_parent:
                latent_parent[there] = here
                order.append(there)
                queue.append(there)

    assignments = _island_assignments(islands, data)
    col = {island.latent: i for i, island in enumerate(islands)}
    w = data.weights.astype(np.float64)

    parents: dict[str, str | None] = {}
    cpts: dict[str, np.ndarray] = {}
    word_tokens: dict[str, str] = {}
    latent_levels: dict[str, int] = {}
    by_name = {island.latent: island for island in islands}
    for name in order:
        up = latent_parent[name]
        parents[name] = up
        latent_levels[name] = 1
        if up is None:
            cpts[name] = by_name[name].prior.copy()
        else:
            zu = assignments[:, col[up]].astype(np.float64)
            zv = assignments[:, col[name]].astype(np.float64)
            table = np.empty((2, 2))
            for u in (0, 1):
                mask = zu == u
                ones = float(w[mask] @ zv[mask]) + 1.0
                total = float(w[mask].sum()) + 2.0
                p1 = ones / total
                table[u] = (1.0 - p1, p1)
            cpts[name] = table
    for island in islands:
        for member in island.members:
            parents[member] = island.latent
            cpts[member] = island.cpts[member].copy()
            word_tokens[member] = member
    return LatentTreeModel(parents, cpts, word_tokens, latent_levels)


def hard_assign(model: LatentTreeModel, data: BinaryDataset) -> BinaryDataset:
    """Dataset of hard latent assignments: 1 where P(latent = 1 | row) > 0.5.

    Ties at exactly 0.5 go to 0. Identical projected rows are merged, weights
    summed, document id lists concatenated in row order.
    """
    observed = model._observation_matrix(data)
    posterior = model.posterior_batch(observed)
    assigned = (posterior > 0.5).astype(np.uint8)
    return BinaryDataset.from_rows(
        assigned, model.latent_nodes, weights=data.weights, doc_ids=data.doc_ids
    )


def learn(data: BinaryDataset, config: LearnConfig) -> LatentTreeModel:
    """Learn a full stacked model from a binary dataset.

    Constant columns are dropped with a warning before learning. Levels are
    added until at most config.top_level_max latents remain (or a single
    island forms); the final level's Chow-Liu tree, rooted at its highest-MI-
    degree latent, becomes the top of the model.
    """
    if data.n_vars < 2:
        raise ValueError("learning needs at least two variables")
    keep = [i for i in range(data.n_vars) if len(np.unique(data.matrix[:, i])) > 1]
    if len(keep) < data.n_vars:
        dropped = [data.variables[i] for i in range(data.n_vars) if i not in keep]
        logger.warning("dropping %d constant column(s): %s", len(dropped), " ".join(dropped))
        if len(keep) < 2:
            raise ValueError("fewer than two non-constant columns; nothing to learn")
        data = BinaryDataset.from_rows(
            data.matrix[:, keep],
            [data.variables[i] for i in keep],
            weights=data.weights,
            doc_ids=data.doc_ids,
        )

    per_level: list[tuple[list[Island], LatentTreeModel]] = []
    current = data
    level = 1
    while True:
        islands = build_islands(current.variables, current, config, level=level)
        edges = link_islands(islands, current)
        level_model = _level_model(islands, edges, current)
        logger.info(
            "level %d: %d island(s), log-likelihood %.4f",
            level,
            len(islands),
            level_model.log_likelihood(current),
        )
        per_level.append((islands, level_model))
        if len(islands) <= config.top_level_max or len(islands) == 1:
            break
        current = hard_assign(level_model, current)
        level += 1

    top_islands, top_model = per_level[-1]
    n_levels = len(per_level)
    parents: dict[str, str | None] = {}
    cpts: dict[str, np.ndarray] = {}
    word_tokens: dict[str, str] = {}
    latent_levels: dict[str, int] = {}
    for latent in top_model.latent_nodes:
        parents[latent] = top_model.parent(latent)
        cpts[latent] = top_model.cpt(latent)
        latent_levels[latent] = n_levels
    for depth, (islands, _) in enumerate(per_level, start=1):
        for island in islands:
            latent_levels[island.latent] = depth
            for member in island.members:
                parents[member] = island.latent
                cpts[member] = island.cpts[member].copy()
                if depth == 1:
                    word_tokens[member] = member
    return LatentTreeModel(parents, cpts, word_tokens, latent_levels)
