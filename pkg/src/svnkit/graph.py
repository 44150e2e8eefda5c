"""Network containers, degree/strength bookkeeping, bipartite projection and TSV I/O.

Node labels are opaque strings.  Every container keeps its labels in a
canonical order (natural sort, so ``a2`` precedes ``a10``) and refers to
nodes internally by their dense integer position in that order.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
from scipy import sparse

__all__ = [
    "FormatError",
    "WeightedNetwork",
    "BipartiteNetwork",
    "ProjectedNetwork",
    "NodeStrength",
    "load_weighted",
    "load_bipartite",
    "project",
    "degrees_strengths",
    "write_weighted",
    "write_bipartite",
    "write_projected",
    "write_node_index",
    "natural_key",
]


class FormatError(ValueError):
    """Malformed or invalid edge-list input.  ``lineno`` is 1-based, or None."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


_DIGITS = re.compile(r"(\d+)")


def natural_key(label: str):
    """Sort key treating embedded digit runs as integers."""
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in _DIGITS.split(label) if tok]


def _canonical(labels: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(labels), key=lambda s: (natural_key(s), s)))


def normalize_side(side: str) -> str:
    s = str(side).upper()
    if s not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return s


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


# ---------------------------------------------------------------------------
# Weighted networks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """Weighted network stored as directed arcs.

    Undirected input is stored as two half-edges per link so that every
    link can be examined from both endpoints.  ``source``/``target``/``weight``
    are the arcs sorted by (source, target).
    """

    labels: tuple[str, ...]
    source: np.ndarray
    target: np.ndarray
    weight: np.ndarray
    directed: bool

    @classmethod
    def from_edges(cls, edges, directed: bool = False, nodes: Iterable[str] | None = None) -> "WeightedNetwork":
        """Build from ``(source, target, weight)`` triples.

        Raises ``ValueError`` on self-loops, non-positive weights and repeated
        pairs (ordered pairs when directed, unordered otherwise).
        """
        edges = [(str(u), str(v), float(w)) for u, v, w in edges]
        seen = set()
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u!r}")
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"weight of ({u!r}, {v!r}) must be positive and finite, got {w}")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(key)
        labels = _canonical([x for u, v, _ in edges for x in (u, v)] + list(nodes or ()))
        index = {lab: i for i, lab in enumerate(labels)}
        src = [index[u] for u, _, _ in edges]
        dst = [index[v] for _, v, _ in edges]
        wts = [w for _, _, w in edges]
        if not directed:
            src, dst, wts = src + dst, dst + src, wts + wts
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        wts = np.asarray(wts, dtype=float)
        order = np.lexsort((dst, src))
        return cls(labels, src[order], dst[order], wts[order], bool(directed))

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_arcs(self) -> int:
        return int(self.source.size)

    @property
    def n_edges(self) -> int:
        """Number of links as given on input (undirected links counted once)."""
        return self.n_arcs if self.directed else self.n_arcs // 2

    @property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.source, minlength=self.n_nodes)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.target, minlength=self.n_nodes)

    def out_strength(self) -> np.ndarray:
        return np.bincount(self.source, weights=self.weight, minlength=self.n_nodes)

    def in_strength(self) -> np.ndarray:
        return np.bincount(self.target, weights=self.weight, minlength=self.n_nodes)

    def strength(self, label: str) -> float:
        return float(self.out_strength()[self.index[label]])

    def normalized_weights(self) -> np.ndarray:
        """x_ij = w_ij / s_i for every arc, with s_i the source's (outgoing) strength."""
        return self.weight / self.out_strength()[self.source]

    def edges(self) -> list[tuple[str, str, float]]:
        """Edges as labels; undirected links reported once with source < target."""
        keep = np.ones(self.n_arcs, bool) if self.directed else self.source < self.target
        return [
            (self.labels[s], self.labels[t], float(w))
            for s, t, w in zip(self.source[keep], self.target[keep], self.weight[keep])
        ]


class NodeStrength(NamedTuple):
    node: str
    k_out: int
    s_out: float
    k_in: int
    s_in: float


def degrees_strengths(wn: WeightedNetwork) -> list[NodeStrength]:
    """Per-node degree and strength.

    For undirected networks the in- and out- columns coincide and give the
    plain degree k_i and strength s_i.
    """
    k_out, s_out = wn.out_degree(), wn.out_strength()
    k_in, s_in = wn.in_degree(), wn.in_strength()
    return [
        NodeStrength(lab, int(k_out[i]), float(s_out[i]), int(k_in[i]), float(s_in[i]))
        for i, lab in enumerate(wn.labels)
    ]


def load_weighted(path, directed: bool = False) -> WeightedNetwork:
    """Read a ``source<TAB>target<TAB>weight`` file."""
    edges = []
    seen = set()
    for lineno, fields in _data_lines(path):
        if len(fields) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
        u, v, raw = fields
        if not u or not v:
            raise FormatError("empty node label", lineno)
        try:
            w = float(raw)
        except ValueError:
            raise FormatError(f"weight {raw!r} is not a number", lineno) from None
        if u == v:
            raise FormatError(f"self-loop on node {u!r}", lineno)
        if not (math.isfinite(w) and w > 0):
            raise FormatError(f"non-positive weight {raw!r}", lineno)
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"duplicate edge ({u!r}, {v!r})", lineno)
        seen.add(key)
        edges.append((u, v, w))
    return WeightedNetwork.from_edges(edges, directed=directed)


def write_weighted(wn: WeightedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w in wn.edges():
            fh.write(f"{u}\t{v}\t{w!r}\n")


def write_node_index(labels: Iterable[str], path) -> None:
    """Sidecar mapping ``label<TAB>index``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, lab in enumerate(labels):
            fh.write(f"{lab}\t{i}\n")


# ---------------------------------------------------------------------------
# Bipartite networks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BipartiteNetwork:
    """Binary bipartite network between disjoint node sets A and B.

    The two sets live in separate namespaces, so one label may name a node
    in A and a different node in B.  Links are index pairs sorted by (a, b).
    """

    a_labels: tuple[str, ...]
    b_labels: tuple[str, ...]
    a_idx: np.ndarray
    b_idx: np.ndarray

    @classmethod
    def from_links(cls, links, a_nodes=None, b_nodes=None, strict: bool = False) -> "BipartiteNetwork":
        """Build from ``(a, b)`` label pairs.

        Repeated links are collapsed with a warning, or rejected when
        ``strict`` is true.  ``a_nodes``/``b_nodes`` add nodes without links.
        """
        pairs = [(str(a), str(b)) for a, b in links]
        unique = set(pairs)
        if len(unique) != len(pairs):
            msg = f"{len(pairs) - len(unique)} duplicate link(s)"
            if strict:
                raise ValueError(msg)
            warnings.warn(msg + " ignored", stacklevel=2)
        a_labels = _canonical([a for a, _ in unique] + [str(x) for x in (a_nodes or ())])
        b_labels = _canonical([b for _, b in unique] + [str(x) for x in (b_nodes or ())])
        a_index = {lab: i for i, lab in enumerate(a_labels)}
        b_index = {lab: i for i, lab in enumerate(b_labels)}
        ai = np.fromiter((a_index[a] for a, _ in unique), dtype=np.int64, count=len(unique))
        bi = np.fromiter((b_index[b] for _, b in unique), dtype=np.int64, count=len(unique))
        return cls._from_indices(a_labels, b_labels, ai, bi)

    @classmethod
    def _from_indices(cls, a_labels, b_labels, a_idx, b_idx) -> "BipartiteNetwork":
        a_idx = np.asarray(a_idx, dtype=np.int64)
        b_idx = np.asarray(b_idx, dtype=np.int64)
        order = np.lexsort((b_idx, a_idx))
        return cls(tuple(a_labels), tuple(b_labels), a_idx[order], b_idx[order])

    @property
    def n_a(self) -> int:
        return len(self.a_labels)

    @property
    def n_b(self) -> int:
        return len(self.b_labels)

    @property
    def n_links(self) -> int:
        return int(self.a_idx.size)

    def labels(self, side: str) -> tuple[str, ...]:
        return self.a_labels if normalize_side(side) == "A" else self.b_labels

    def degrees(self, side: str) -> np.ndarray:
        if normalize_side(side) == "A":
            return np.bincount(self.a_idx, minlength=self.n_a)
        return np.bincount(self.b_idx, minlength=self.n_b)

    def biadjacency(self, side: str = "A") -> sparse.csr_matrix:
        """0/1 matrix with rows on ``side`` and columns on the opposite set."""
        if normalize_side(side) == "A":
            rows, cols, shape = self.a_idx, self.b_idx, (self.n_a, self.n_b)
        else:
            rows, cols, shape = self.b_idx, self.a_idx, (self.n_b, self.n_a)
        data = np.ones(rows.size, dtype=np.int64)
        return sparse.csr_matrix((data, (rows, cols)), shape=shape)

    def links(self) -> list[tuple[str, str]]:
        return [(self.a_labels[a], self.b_labels[b]) for a, b in zip(self.a_idx, self.b_idx)]

    def same_as(self, other: "BipartiteNetwork") -> bool:
        return (
            self.a_labels == other.a_labels
            and self.b_labels == other.b_labels
            and np.array_equal(self.a_idx, other.a_idx)
            and np.array_equal(self.b_idx, other.b_idx)
        )


def load_bipartite(path, strict: bool = False) -> BipartiteNetwork:
    """Read a ``nodeA<TAB>nodeB`` file; the column decides set membership."""
    links = []
    seen = set()
    dupes = []
    for lineno, fields in _data_lines(path):
        if len(fields) != 2:
            raise FormatError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        a, b = fields
        if not a or not b:
            raise FormatError("empty node label", lineno)
        if (a, b) in seen:
            if strict:
                raise FormatError(f"duplicate link ({a!r}, {b!r})", lineno)
            dupes.append(lineno)
            continue
        seen.add((a, b))
        links.append((a, b))
    if dupes:
        warnings.warn(f"{len(dupes)} duplicate link(s) ignored (first at line {dupes[0]})", stacklevel=2)
    return BipartiteNetwork.from_links(links)


def write_bipartite(bn: BipartiteNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in bn.links():
            fh.write(f"{a}\t{b}\n")


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjectedNetwork:
    """One-mode co-occurrence network over one side of a bipartite network.

    Only pairs with at least one common neighbour are stored, as ``i < j``
    index pairs with their co-occurrence count.
    """

    labels: tuple[str, ...]
    degrees: np.ndarray
    population: int
    i: np.ndarray
    j: np.ndarray
    cooccurrence: np.ndarray
    side: str = "A"

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return int(self.i.size)

    def edges(self) -> list[tuple[str, str, int]]:
        return [
            (self.labels[a], self.labels[b], int(c))
            for a, b, c in zip(self.i, self.j, self.cooccurrence)
        ]

    def count(self, u: str, v: str) -> int:
        """Co-occurrence of two labels (0 when not linked)."""
        index = {lab: k for k, lab in enumerate(self.labels)}
        a, b = sorted((index[u], index[v]))
        hit = np.flatnonzero((self.i == a) & (self.j == b))
        return int(self.cooccurrence[hit[0]]) if hit.size else 0


def project(bn: BipartiteNetwork, side: str = "A") -> ProjectedNetwork:
    side = normalize_side(side)
    m = bn.biadjacency(side)
    co = sparse.triu(m @ m.T, k=1).tocoo()
    order = np.lexsort((co.col, co.row))
    return ProjectedNetwork(
        labels=bn.labels(side),
        degrees=np.asarray(m.sum(axis=1)).ravel().astype(np.int64),
        population=m.shape[1],
        i=co.row[order].astype(np.int64),
        j=co.col[order].astype(np.int64),
        cooccurrence=co.data[order].astype(np.int64),
        side=side,
    )


def write_projected(pn: ProjectedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, c in pn.edges():
            fh.write(f"{u}\t{v}\t{c}\n")
