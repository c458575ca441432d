"""Tree-structured models over binary variables with exact inference.

A model is a rooted tree of binary nodes: word nodes (level 0, always leaves,
bound to a vocabulary token) and latent nodes (level >= 1, always internal).
The joint factorizes as the root marginal times one conditional table per
edge. Inference is a two-pass message propagation over the tree, carried out
in the log domain and vectorized across observation rows.

Construction layers the tree: a latent at level l has children at level l-1,
except at the top level, where latents may also chain to other top-level
latents (the linked top of a stacked model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

WORD = "word"
LATENT = "latent"

_ROW_SUM_TOL = 1e-12
_MAGIC = "topictree-model"
_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a model file cannot be parsed."""


def mutual_information(joint: np.ndarray | Sequence[Sequence[float]]) -> float:
    """Mutual information, in nats, of a 2x2 joint table. 0 ln 0 is taken as 0."""
    p = np.asarray(joint, dtype=np.float64)
    if p.shape != (2, 2):
        raise ValueError(f"joint table must be 2x2, got shape {p.shape}")
    if (p < 0).any():
        raise ValueError("joint table has a negative entry")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"joint table sums to {total}, not 1")
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    mi = 0.0
    for a in range(2):
        for b in range(2):
            if p[a, b] > 0.0:
                mi += p[a, b] * (math.log(p[a, b]) - math.log(pa[a]) - math.log(pb[b]))
    return max(mi, 0.0)


@dataclass(frozen=True)
class Node:
    name: str
    kind: str
    level: int
    token: str | None = None


class LatentTreeModel:
    """Rooted tree of binary variables with per-edge conditional tables.

    parents maps every node to its parent name (None exactly once, at the
    root). cpts maps the root to a length-2 marginal and every other node X
    to a 2x2 table whose row u is the distribution of X given parent = u.
    word_tokens binds word node names to vocabulary tokens; all remaining
    nodes are latent and take their level from latent_levels.
    """

    def __init__(
        self,
        parents: Mapping[str, str | None],
        cpts: Mapping[str, np.ndarray | Sequence],
        word_tokens: Mapping[str, str],
        latent_levels: Mapping[str, int],
        *,
        strict_levels: bool = True,
    ) -> None:
        self._parent: dict[str, str | None] = dict(parents)
        self._children: dict[str, list[str]] = {name: [] for name in self._parent}
        roots = [name for name, parent in self._parent.items() if parent is None]
        if len(roots) != 1:
            raise ValueError(f"model must have exactly one root, found {len(roots)}")
        self.root: str = roots[0]
        for name, parent in self._parent.items():
            if parent is None:
                continue
            if parent not in self._parent:
                raise ValueError(f"node {name!r} references unknown parent {parent!r}")
            self._children[parent].append(name)

        self.nodes: dict[str, Node] = {}
        for name in self._parent:
            if name in word_tokens:
                self.nodes[name] = Node(name, WORD, 0, word_tokens[name])
            elif name in latent_levels:
                level = int(latent_levels[name])
                if level < 1:
                    raise ValueError(f"latent {name!r} must have level >= 1")
                self.nodes[name] = Node(name, LATENT, level)
            else:
                raise ValueError(f"node {name!r} has neither a token binding nor a level")

        self._cpts: dict[str, np.ndarray] = {}
        for name in self._parent:
            if name not in cpts:
                raise ValueError(f"node {name!r} has no conditional table")
            table = np.array(cpts[name], dtype=np.float64)
            expect = (2,) if name == self.root else (2, 2)
            if table.shape != expect:
                raise ValueError(f"table for {name!r} has shape {table.shape}, expected {expect}")
            self._cpts[name] = table
        extra = set(cpts) - set(self._parent)
        if extra:
            raise ValueError(f"tables for unknown nodes: {sorted(extra)}")

        self._order = self._topological()
        self.word_nodes: tuple[str, ...] = tuple(n for n in self._order if self.nodes[n].kind == WORD)
        self.latent_nodes: tuple[str, ...] = tuple(n for n in self._order if self.nodes[n].kind == LATENT)
        self._validate(strict_levels)
        self._log_cpts = {name: _safe_log(table) for name, table in self._cpts.items()}

    # -- structure ---------------------------------------------------------

    def _topological(self) -> tuple[str, ...]:
        order: list[str] = []
        stack = [self.root]
        seen = set()
        while stack:
            name = stack.pop()
            if name in seen:
                raise ValueError("model graph contains a cycle")
            seen.add(name)
            order.append(name)
            stack.extend(reversed(self._children[name]))
        if len(order) != len(self._parent):
            missing = sorted(set(self._parent) - seen)
            raise ValueError(f"nodes unreachable from root (cycle or disconnection): {missing}")
        return tuple(order)

    def _validate(self, strict_levels: bool) -> None:
        if self.nodes[self.root].kind != LATENT:
            raise ValueError("root must be a latent node")
        top = max((node.level for node in self.nodes.values() if node.kind == LATENT), default=0)
        for name, node in self.nodes.items():
            kids = self._children[name]
            if node.kind == WORD and kids:
                raise ValueError(f"word node {name!r} must be a leaf")
            if node.kind == LATENT and not kids:
                raise ValueError(f"latent node {name!r} has no children")
            table = self._cpts[name]
            if (table < 0).any() or (table > 1).any():
                raise ValueError(f"table for {name!r} has entries outside [0, 1]")
            sums = table.sum(axis=-1)
            if np.abs(sums - 1.0).max() > _ROW_SUM_TOL:
                raise ValueError(f"table rows for {name!r} do not sum to 1")
            if strict_levels and name != self.root:
                parent_level = self.nodes[self._parent[name]].level
                if node.level == parent_level - 1:
                    continue
                if node.kind == LATENT and node.level == parent_level == top:
                    continue  # chained top-level latents
                raise ValueError(
                    f"node {name!r} at level {node.level} under parent at level {parent_level}"
                )

    def parent(self, name: str) -> str | None:
        return self._parent[name]

    def children(self, name: str) -> tuple[str, ...]:
        return tuple(self._children[name])

    def cpt(self, name: str) -> np.ndarray:
        return self._cpts[name].copy()

    def level(self, name: str) -> int:
        return self.nodes[name].level

    def token(self, name: str) -> str | None:
        return self.nodes[name].token

    @property
    def max_level(self) -> int:
        return max(self.nodes[n].level for n in self.latent_nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    # -- exact quantities ---------------------------------------------------

    def joint_probability(self, assignment: Mapping[str, int]) -> float:
        """Probability of one full assignment of every variable to 0/1."""
        missing = set(self._parent) - set(assignment)
        if missing:
            raise ValueError(f"assignment is missing variables: {sorted(missing)}")
        prob = 1.0
        for name in self._order:
            value = assignment[name]
            if value not in (0, 1):
                raise ValueError(f"assignment for {name!r} must be 0 or 1, got {value!r}")
            parent = self._parent[name]
            if parent is None:
                prob *= self._cpts[name][value]
            else:
                prob *= self._cpts[name][assignment[parent], value]
        return float(prob)

    def _path_to_root(self, name: str) -> list[str]:
        path = [name]
        while (up := self._parent[path[-1]]) is not None:
            path.append(up)
        return path

    def marginal(self, name: str) -> np.ndarray:
        """Length-2 marginal distribution of one variable."""
        path = self._path_to_root(name)[::-1]
        dist = self._cpts[self.root].copy()
        for step in path[1:]:
            dist = dist @ self._cpts[step]
        return dist

    def pairwise_marginal(self, a: str, b: str) -> np.ndarray:
        """2x2 joint of two distinct variables, indexed [value of a, value of b]."""
        if a == b:
            raise ValueError("pairwise marginal requires two distinct variables")
        up_a = self._path_to_root(a)
        up_b = self._path_to_root(b)
        in_a = set(up_a)
        ancestor = next(name for name in up_b if name in in_a)

        def transfer(path_down: list[str]) -> np.ndarray:
            # product of edge tables from the common ancestor down to the target
            out = np.eye(2)
            for step in path_down:
                out = out @ self._cpts[step]
            return out

        down_a = up_a[: up_a.index(ancestor)][::-1]
        down_b = up_b[: up_b.index(ancestor)][::-1]
        if ancestor == a:
            joint = self.marginal(a)[:, None] * transfer(down_b)
            return joint
        if ancestor == b:
            joint = self.marginal(b)[:, None] * transfer(down_a)
            return joint.T
        p_anc = self.marginal(ancestor)
        t_a = transfer(down_a)
        t_b = transfer(down_b)
        return np.einsum("u,ua,ub->ab", p_anc, t_a, t_b)

    # -- message propagation -------------------------------------------------

    def _observation_matrix(self, data) -> np.ndarray:
        tokens = {self.nodes[n].token: n for n in self.word_nodes}
        if set(tokens) != set(data.vocabulary.tokens):
            raise ValueError("dataset variables do not match the model's word nodes")
        order = [data.vocabulary.token_index[self.nodes[n].token] for n in self.word_nodes]
        return data.matrix[:, order].astype(np.float64)

    def _upward(self, observed: np.ndarray):
        """Collect pass. observed is (rows, n_words) of 0/1 in word_nodes order.

        Returns per-row log evidence, per-node log lambda arrays, and the
        per-child log message to its parent.
        """
        rows = observed.shape[0]
        col = {name: i for i, name in enumerate(self.word_nodes)}
        lam: dict[str, np.ndarray] = {}
        msg: dict[str, np.ndarray] = {}
        for name in reversed(self._order):
            node = self.nodes[name]
            if node.kind == WORD:
                x = observed[:, col[name]]
                arr = np.full((rows, 2), -np.inf)
                arr[x == 0, 0] = 0.0
                arr[x == 1, 1] = 0.0
                lam[name] = arr
            else:
                arr = np.zeros((rows, 2))
                for child in self._children[name]:
                    arr = arr + msg[child]
                lam[name] = arr
            if name != self.root:
                log_cpt = self._log_cpts[name]  # [parent value, own value]
                with np.errstate(invalid="ignore"):
                    msg[name] = np.logaddexp(
                        log_cpt[None, :, 0] + lam[name][:, 0:1],
                        log_cpt[None, :, 1] + lam[name][:, 1:2],
                    )
        log_prior = self._log_cpts[self.root]
        with np.errstate(invalid="ignore"):
            log_evidence = np.logaddexp(
                log_prior[0] + lam[self.root][:, 0], log_prior[1] + lam[self.root][:, 1]
            )
        return log_evidence, lam, msg

    def posterior_batch(self, observed: np.ndarray) -> np.ndarray:
        """P(latent = 1 | row) for every latent, shape (rows, len(latent_nodes)).

        observed is a (rows, n_words) 0/1 array in word_nodes order. Raises if
        any row has probability zero under the model.
        """
        observed = np.asarray(observed, dtype=np.float64)
        log_evidence, lam, msg = self._upward(observed)
        if np.isneginf(log_evidence).any():
            at = int(np.isneginf(log_evidence).argmax())
            raise ValueError(f"observation row {at} has probability 0 under the model")
        rows = observed.shape[0]
        pi: dict[str, np.ndarray] = {self.root: np.broadcast_to(self._log_cpts[self.root], (rows, 2))}
        out = np.empty((rows, len(self.latent_nodes)))
        latent_col = {name: i for i, name in enumerate(self.latent_nodes)}
        for name in self._order:
            node = self.nodes[name]
            if node.kind == LATENT:
                belief = pi[name] + lam[name]
                norm = np.logaddexp(belief[:, 0], belief[:, 1])
                out[:, latent_col[name]] = np.exp(belief[:, 1] - norm)
            kids = self._children[name]
            if not kids:
                continue
            # exclusive sums of sibling messages via prefix/suffix products,
            # which stay exact when messages contain -inf
            stacked = [msg[child] for child in kids]
            prefix = np.zeros((rows, 2))
            partial: list[np.ndarray] = []
            for child_msg in stacked:
                partial.append(prefix)
                prefix = prefix + child_msg
            suffix = np.zeros((rows, 2))
            for i in range(len(kids) - 1, -1, -1):
                child = kids[i]
                if self.nodes[child].kind == LATENT:
                    exclusive = pi[name] + partial[i] + suffix
                    log_cpt = self._log_cpts[child]
                    with np.errstate(invalid="ignore"):
                        pi[child] = np.logaddexp(
                            log_cpt[None, 0, :] + exclusive[:, 0:1],
                            log_cpt[None, 1, :] + exclusive[:, 1:2],
                        )
                suffix = suffix + stacked[i]
        return out

    def posterior_latent(self, observation: Mapping[str, int]) -> dict[str, float]:
        """Posterior P(latent = 1 | full word observation) for every latent node."""
        missing = [n for n in self.word_nodes if n not in observation]
        if missing:
            raise ValueError(f"observation is missing word variables: {missing}")
        row = np.array([[observation[n] for n in self.word_nodes]], dtype=np.float64)
        if not np.isin(row, (0, 1)).all():
            raise ValueError("observed values must be 0 or 1")
        posterior = self.posterior_batch(row)[0]
        return {name: float(posterior[i]) for i, name in enumerate(self.latent_nodes)}

    def log_likelihood(self, data) -> float:
        """Weighted log-likelihood of a dataset; -inf if any row has probability 0."""
        observed = self._observation_matrix(data)
        log_evidence, _, _ = self._upward(observed)
        if np.isneginf(log_evidence).any():
            return float("-inf")
        return float(np.asarray(data.weights, dtype=np.float64) @ log_evidence)

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Ancestral samples: (words (n, n_words), latents (n, n_latents)) 0/1 arrays."""
        values: dict[str, np.ndarray] = {}
        for name in self._order:
            u = rng.random(n)
            parent = self._parent[name]
            if parent is None:
                values[name] = (u < self._cpts[name][1]).astype(np.uint8)
            else:
                p1 = self._cpts[name][values[parent], 1]
                values[name] = (u < p1).astype(np.uint8)
        words = np.column_stack([values[w] for w in self.word_nodes]) if self.word_nodes else np.zeros((n, 0), np.uint8)
        latents = np.column_stack([values[z] for z in self.latent_nodes])
        return words, latents

    def reroot(self, new_root: str) -> "LatentTreeModel":
        """Equivalent model rooted at another latent node.

        Edges along the old-root-to-new-root path are reversed by Bayes rule.
        Level layering generally no longer holds afterwards, so the result
        skips the layering check; the joint distribution is unchanged.
        """
        if self.nodes[new_root].kind != LATENT:
            raise ValueError("models can only be rooted at a latent node")
        if new_root == self.root:
            return self
        path = self._path_to_root(new_root)[::-1]  # old root ... new root
        parents = dict(self._parent)
        cpts = {name: self._cpts[name].copy() for name in self._cpts}
        marginals = {name: self.marginal(name) for name in path}
        for up, down in zip(path, path[1:]):
            # original edge up -> down becomes down -> up
            table = self._cpts[down]  # [up value, down value]
            m_up, m_down = marginals[up], marginals[down]
            reversed_table = np.empty((2, 2))
            for v in range(2):
                if m_down[v] > 0:
                    p1 = table[1, v] * m_up[1] / m_down[v]
                    reversed_table[v] = (1.0 - p1, p1)
                else:
                    reversed_table[v] = (0.5, 0.5)  # unreachable state
            parents[up] = down
            cpts[up] = reversed_table
        parents[new_root] = None
        cpts[new_root] = marginals[new_root].copy()
        word_tokens = {n: self.nodes[n].token for n in self.word_nodes}
        latent_levels = {n: self.nodes[n].level for n in self.latent_nodes}
        return LatentTreeModel(parents, cpts, word_tokens, latent_levels, strict_levels=False)

    # -- serialization --------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Plain-text model file; probabilities carry 17 significant digits."""
        lines = [f"{_MAGIC} {_VERSION}"]
        edges = [(n, p) for n, p in self._parent.items() if p is not None]
        lines.append(f"nodes {len(self._parent)} edges {len(edges)}")
        for name in self._order:
            node = self.nodes[name]
            if node.kind == WORD:
                lines.append(f"node {name} {WORD} 0 {node.token}")
            else:
                lines.append(f"node {name} {LATENT} {node.level}")
        for name in self._order:
            parent = self._parent[name]
            if parent is not None:
                lines.append(f"edge {name} {parent}")
        for name in self._order:
            flat = " ".join(f"{x:.17g}" for x in self._cpts[name].reshape(-1))
            lines.append(f"cpt {name} {flat}")
        Path(path).write_text("\n".join(lines) + "\n", "utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LatentTreeModel":
        try:
            lines = Path(path).read_text("utf-8").splitlines()
        except OSError as exc:
            raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
        if not lines:
            raise ModelFormatError(f"{path}: empty model file")
        head = lines[0].split()
        if len(head) != 2 or head[0] != _MAGIC:
            raise ModelFormatError(f"{path}: not a model file (bad header)")
        if head[1] != str(_VERSION):
            raise ModelFormatError(f"{path}: unsupported model version {head[1]}")
        if len(lines) < 2:
            raise ModelFormatError(f"{path}: missing counts line")
        counts = lines[1].split()
        if len(counts) != 4 or counts[0] != "nodes" or counts[2] != "edges":
            raise ModelFormatError(f"{path}: malformed counts line")
        try:
            n_nodes, n_edges = int(counts[1]), int(counts[3])
        except ValueError as exc:
            raise ModelFormatError(f"{path}: malformed counts line") from exc

        word_tokens: dict[str, str] = {}
        latent_levels: dict[str, int] = {}
        parents: dict[str, str | None] = {}
        cpts: dict[str, np.ndarray] = {}
        for i, line in enumerate(lines[2:], start=3):
            if not line.strip():
                continue
            parts = line.split()
            kind, rest = parts[0], parts[1:]
            try:
                if kind == "node":
                    if rest[1] == WORD:
                        if len(rest) != 4 or rest[2] != "0":
                            raise ModelFormatError(f"{path}: line {i}: malformed word node")
                        word_tokens[rest[0]] = rest[3]
                    elif rest[1] == LATENT:
                        if len(rest) != 3:
                            raise ModelFormatError(f"{path}: line {i}: malformed latent node")
                        latent_levels[rest[0]] = int(rest[2])
                    else:
                        raise ModelFormatError(f"{path}: line {i}: unknown node kind {rest[1]!r}")
                    parents.setdefault(rest[0], None)
                elif kind == "edge":
                    if len(rest) != 2:
                        raise ModelFormatError(f"{path}: line {i}: malformed edge")
                    parents[rest[0]] = rest[1]
                elif kind == "cpt":
                    values = [float(x) for x in rest[1:]]
                    if len(values) == 2:
                        cpts[rest[0]] = np.array(values)
                    elif len(values) == 4:
                        cpts[rest[0]] = np.array(values).reshape(2, 2)
                    else:
                        raise ModelFormatError(f"{path}: line {i}: table needs 2 or 4 values")
                else:
                    raise ModelFormatError(f"{path}: line {i}: unknown directive {kind!r}")
            except (IndexError, ValueError) as exc:
                if isinstance(exc, ModelFormatError):
                    raise
                raise ModelFormatError(f"{path}: line {i}: malformed line") from exc
        if len(parents) != n_nodes:
            raise ModelFormatError(f"{path}: expected {n_nodes} nodes, found {len(parents)}")
        declared_edges = sum(1 for p in parents.values() if p is not None)
        if declared_edges != n_edges:
            raise ModelFormatError(f"{path}: expected {n_edges} edges, found {declared_edges}")
        try:
            return cls(parents, cpts, word_tokens, latent_levels)
        except ValueError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def _safe_log(table: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(table)
