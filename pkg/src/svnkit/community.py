"""Louvain communities and pairwise partition-agreement metrics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph import BipartiteNetwork, ProjectedNetwork, WeightedNetwork
from .svn import ValidatedNetwork, validate_one_tail

__all__ = [
    "Partition",
    "UndirectedGraph",
    "PairContingency",
    "MetricUndefinedError",
    "as_graph",
    "louvain",
    "modularity",
    "pair_contingency",
    "adjusted_rand",
    "adjusted_wallace",
    "community_cores",
    "read_partition",
    "write_partition",
]


class MetricUndefinedError(ValueError):
    """A partition-agreement score has a zero denominator for these inputs."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of nodes to communities.

    Community ids are dense, numbered by first appearance along ``nodes``,
    so two partitions that group nodes the same way compare equal.
    """

    nodes: tuple
    labels: np.ndarray

    def __post_init__(self):
        nodes = tuple(self.nodes)
        raw = np.asarray(self.labels)
        if raw.shape != (len(nodes),):
            raise ValueError("one community label per node required")
        if len(set(nodes)) != len(nodes):
            raise ValueError("a node may appear only once in a partition")
        _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "labels", rank[inverse.reshape(-1)] if raw.size else np.zeros(0, np.int64))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Partition":
        return cls(tuple(mapping), np.array(list(mapping.values())))

    @classmethod
    def empty(cls) -> "Partition":
        return cls((), np.zeros(0, dtype=np.int64))

    @property
    def assignment(self) -> dict:
        return dict(zip(self.nodes, self.labels.tolist()))

    @property
    def coverage(self) -> frozenset:
        return frozenset(self.nodes)

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.nodes == other.nodes and np.array_equal(self.labels, other.labels)

    __hash__ = None

    def communities(self) -> list[list]:
        out = [[] for _ in range(self.n_communities)]
        for node, c in zip(self.nodes, self.labels.tolist()):
            out[c].append(node)
        return out

    def restrict(self, nodes) -> "Partition":
        keep = set(nodes)
        pairs = [(n, c) for n, c in zip(self.nodes, self.labels.tolist()) if n in keep]
        return Partition(tuple(n for n, _ in pairs), np.array([c for _, c in pairs], dtype=np.int64))


@dataclass(frozen=True)
class UndirectedGraph:
    """Weighted undirected simple graph handed to Louvain and modularity."""

    labels: tuple
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_edges(cls, edges, nodes=()) -> "UndirectedGraph":
        """``edges`` holds ``(u, v)`` or ``(u, v, weight)`` tuples; repeated pairs add up."""
        labels = list(dict.fromkeys(list(nodes) + [x for e in edges for x in e[:2]]))
        index = {lab: k for k, lab in enumerate(labels)}
        acc: dict = {}
        for e in edges:
            a, b = index[e[0]], index[e[1]]
            if a == b:
                raise ValueError("self-loops are not supported")
            key = (min(a, b), max(a, b))
            acc[key] = acc.get(key, 0.0) + (float(e[2]) if len(e) > 2 else 1.0)
        keys = sorted(acc)
        return cls(
            tuple(labels),
            np.array([k[0] for k in keys], dtype=np.int64),
            np.array([k[1] for k in keys], dtype=np.int64),
            np.array([acc[k] for k in keys], dtype=float),
        )

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    def degree(self) -> np.ndarray:
        n = self.n_nodes
        return np.bincount(self.u, self.w, n) + np.bincount(self.v, self.w, n)


def as_graph(network, weights: str | None = None) -> UndirectedGraph:
    """Undirected view of a projected, validated or weighted network.

    Projected networks are weighted by co-occurrence unless
    ``weights="binary"``.  Validated networks use their over-expressed
    links only, weight 1 by default or co-occurrence with ``weights="nij"``;
    their node set is the set of nodes touched by those links.
    """
    if isinstance(network, UndirectedGraph):
        return network
    if isinstance(network, ProjectedNetwork):
        w = network.cooccurrence.astype(float)
        if weights == "binary":
            w = np.ones_like(w)
        elif weights not in (None, "nij"):
            raise ValueError(f"unknown weights mode {weights!r}")
        return UndirectedGraph(network.labels, network.i.copy(), network.j.copy(), w)
    if isinstance(network, ValidatedNetwork):
        if weights not in (None, "binary", "nij"):
            raise ValueError(f"unknown weights mode {weights!r}")
        nodes = network.nodes("over")
        use_n = weights == "nij"
        return UndirectedGraph.from_edges(
            [(i, j, float(n) if use_n else 1.0) for i, j, n, _, _ in network.over_edges()], nodes
        )
    if isinstance(network, WeightedNetwork):
        return UndirectedGraph.from_edges(network.edges(), network.labels)
    raise TypeError(f"cannot build a graph from {type(network).__name__}")


# ---------------------------------------------------------------------------
# modularity and Louvain
# ---------------------------------------------------------------------------


def modularity(network, part: Partition, weights: str | None = None) -> float:
    """Q = sum_c (e_c / m - (d_c / 2m)^2) for a weighted undirected graph."""
    g = as_graph(network, weights)
    where = part.assignment
    missing = [lab for lab in g.labels if lab not in where]
    if missing:
        raise ValueError(f"partition does not cover node {missing[0]!r}")
    comm = np.array([where[lab] for lab in g.labels], dtype=np.int64)
    m = g.w.sum()
    if m <= 0:
        raise ValueError("modularity is undefined on a graph without edges")
    ncom = int(comm.max()) + 1
    inside = comm[g.u] == comm[g.v]
    e_c = np.bincount(comm[g.u[inside]], g.w[inside], ncom)
    d_c = np.bincount(comm, g.degree(), ncom)
    return float(np.sum(e_c / m - (d_c / (2 * m)) ** 2))


def _local_moves(adj, k, m2, rng, max_passes=1000):
    """Greedy node moves until no move improves modularity.

    Equal gains (within a relative tolerance) go to the lowest community id.
    """
    n = len(adj)
    comm = list(range(n))
    tot = list(k)
    tol = 1e-12 * m2
    improved = False
    for _ in range(max_passes):
        moved = 0
        for u in rng.permutation(n).tolist():
            cu, ku = comm[u], k[u]
            links: dict = {}
            for v, w in adj[u].items():
                c = comm[v]
                links[c] = links.get(c, 0.0) + w
            tot[cu] -= ku
            best_c = cu
            best = links.get(cu, 0.0) - tot[cu] * ku / m2
            for c, l in links.items():
                gain = l - tot[c] * ku / m2
                if gain > best + tol or (gain >= best - tol and c < best_c):
                    best_c, best = c, gain
            tot[best_c] += ku
            if best_c != cu:
                comm[u] = best_c
                moved += 1
        if not moved:
            break
        improved = True
    return comm, improved


def _dense(comm):
    ids: dict = {}
    return [ids.setdefault(c, len(ids)) for c in comm], len(ids)


def louvain(network, seed: int = 0, weights: str | None = None) -> Partition:
    """Two-phase Louvain modularity optimisation.

    Local moves run to convergence, communities are merged into super-nodes,
    and the two phases repeat until a level brings no change.  Node visiting
    order is shuffled by a generator seeded with ``seed``.
    """
    g = as_graph(network, weights)
    if g.w.size == 0 or g.w.sum() <= 0:
        raise ValueError("Louvain needs a network with at least one edge")
    rng = np.random.default_rng(seed)
    n = g.n_nodes
    adj = [dict() for _ in range(n)]
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        adj[a][b] = adj[a].get(b, 0.0) + w
        adj[b][a] = adj[b].get(a, 0.0) + w
    loops = [0.0] * n
    k = g.degree().tolist()
    m2 = float(sum(k))
    member = list(range(n))  # original node -> current super-node

    while True:
        comm, improved = _local_moves(adj, k, m2, rng)
        if not improved:
            break
        comm, nc = _dense(comm)
        member = [comm[s] for s in member]
        new_adj = [dict() for _ in range(nc)]
        new_loops = [0.0] * nc
        new_k = [0.0] * nc
        for u in range(len(adj)):
            cu = comm[u]
            new_loops[cu] += loops[u]
            new_k[cu] += k[u]
            for v, w in adj[u].items():
                cv = comm[v]
                if cu == cv:
                    new_loops[cu] += w / 2.0
                else:
                    new_adj[cu][cv] = new_adj[cu].get(cv, 0.0) + w
        adj, loops, k = new_adj, new_loops, new_k
        if nc == 1:
            break
    return Partition(g.labels, np.asarray(member, dtype=np.int64))


# ---------------------------------------------------------------------------
# partition comparison
# ---------------------------------------------------------------------------


class PairContingency(NamedTuple):
    """Node pairs co-clustered in both, first only, second only, neither."""

    n11: int
    n10: int
    n01: int
    n00: int

    @property
    def n_pairs(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00


def _pairs(counts) -> int:
    counts = np.asarray(counts, dtype=np.int64)
    return int(np.sum(counts * (counts - 1) // 2))


def _common(a: Partition, b: Partition):
    where_b = b.assignment
    common = [(c, where_b[n]) for n, c in zip(a.nodes, a.labels.tolist()) if n in where_b]
    if len(common) < 2:
        raise MetricUndefinedError(f"partitions share {len(common)} node(s); at least 2 needed")
    la = np.array([x for x, _ in common], dtype=np.int64)
    lb = np.array([y for _, y in common], dtype=np.int64)
    return la, lb


def pair_contingency(a: Partition, b: Partition) -> PairContingency:
    """Pair counts over the nodes covered by both partitions."""
    la, lb = _common(a, b)
    n = la.size
    joint = np.unique(la * (int(lb.max()) + 1) + lb, return_counts=True)[1]
    both = _pairs(joint)
    in_a = _pairs(np.bincount(la))
    in_b = _pairs(np.bincount(lb))
    total = n * (n - 1) // 2
    return PairContingency(both, in_a - both, in_b - both, total - in_a - in_b + both)


def adjusted_rand(a: Partition, b: Partition) -> float:
    """Hubert-Arabie adjusted Rand index on the common nodes.

    Returns 1.0 in the degenerate case where both partitions are all
    singletons or both a single block.
    """
    t = pair_contingency(a, b)
    total = t.n_pairs
    in_a, in_b = t.n11 + t.n10, t.n11 + t.n01
    num = 2 * (t.n11 * total - in_a * in_b)
    den = (in_a + in_b) * total - 2 * in_a * in_b
    if den == 0:
        return 1.0
    return num / den


def adjusted_wallace(candidate: Partition, reference: Partition) -> float:
    """Chance-corrected share of the candidate's co-clustered pairs also co-clustered in the reference.

    W = n11 / (n11 + n10) is compared with E, the probability that a random
    node pair is co-clustered in the reference: AW = (W - E) / (1 - E).
    Raises :class:`MetricUndefinedError` when the candidate has no
    co-clustered pair or the reference is a single block.
    """
    t = pair_contingency(candidate, reference)
    total = t.n_pairs
    in_cand, in_ref = t.n11 + t.n10, t.n11 + t.n01
    if in_cand == 0:
        raise MetricUndefinedError("candidate partition has no co-clustered pair")
    if in_ref == total:
        raise MetricUndefinedError("reference partition is a single community")
    return (t.n11 * total - in_cand * in_ref) / (in_cand * (total - in_ref))


def community_cores(
    bn: BipartiteNetwork,
    side: str = "A",
    alpha: float = 0.05,
    method: str = "fdr",
    seed: int = 0,
    weights: str = "binary",
) -> Partition:
    """Louvain communities of the one-tail validated network.

    Only nodes with at least one validated link are covered.
    """
    vn = validate_one_tail(bn, side, alpha, method)
    if not vn.over_edges():
        warnings.warn("validated network is empty; returning an empty partition", stacklevel=2)
        return Partition.empty()
    return louvain(vn, seed=seed, weights=weights)


def write_partition(part: Partition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for node, c in zip(part.nodes, part.labels.tolist()):
            fh.write(f"{node}\t{c}\n")


def read_partition(path) -> Partition:
    nodes, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected node<TAB>community")
            nodes.append(fields[0])
            labels.append(fields[1])
    return Partition(tuple(nodes), np.array(labels, dtype=object) if labels else np.zeros(0, np.int64))
