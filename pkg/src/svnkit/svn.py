"""Statistically validated networks from bipartite projections.

Every pair of nodes on the tested side is checked against the
hypergeometric null for its number of common neighbours, using the size
of the opposite set as population.  The one-tail mode tests over-expression
on the links of the projected network; the two-tail mode tests every pair
for both over- and under-expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corrections import TestBattery, correct
from .graph import BipartiteNetwork, normalize_side
from .pvalues import PValueRecord, tail_lookup

__all__ = ["ValidatedNetwork", "validate_one_tail", "validate_two_tail", "pair_pvalues", "write_validated"]

VALIDATION_METHODS = ("bonferroni", "fdr")
FAMILIES = ("tests", "pairs")

# Upper bound on the number of co-occurrence entries materialised at once.
_BLOCK_ENTRIES = 1 << 20


@dataclass(frozen=True)
class ValidatedNetwork:
    """Validated links ``(i, j, n_ij, tail, p_value)`` with ``i`` before ``j`` in node order."""

    labels: tuple
    edges: tuple
    method: str
    alpha: float
    n_tests: int
    side: str
    tails: str
    family: str = "tests"
    population: int = 0
    excluded: tuple = field(default=())

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def over_edges(self):
        return [e for e in self.edges if e[3] == "over"]

    def under_edges(self):
        return [e for e in self.edges if e[3] == "under"]

    def nodes(self, tail: str = "over") -> list[str]:
        """Labels touched by validated links of ``tail``, in node order."""
        order = {lab: k for k, lab in enumerate(self.labels)}
        hit = {x for e in self.edges if e[3] == tail for x in e[:2]}
        return sorted(hit, key=order.__getitem__)

    def summary(self) -> dict:
        return {
            "side": self.side,
            "tails": self.tails,
            "family": self.family,
            "method": self.method,
            "alpha": self.alpha,
            "n_tests": self.n_tests,
            "population": self.population,
            "n_validated": self.n_edges,
            "n_over": len(self.over_edges()),
            "n_under": len(self.under_edges()),
            "excluded_degree_zero": len(self.excluded),
        }


def _check(alpha, method, family="tests"):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if method not in VALIDATION_METHODS:
        raise ValueError(f"method must be one of {VALIDATION_METHODS}, got {method!r}")
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")


def pair_pvalues(population: int, deg_i: int, deg_j: np.ndarray, n_ij: np.ndarray):
    """Vectorised over/under p-values of one node against many partners."""
    p_over = np.empty(n_ij.size)
    p_under = np.empty(n_ij.size)
    for dj in np.unique(deg_j):
        sel = deg_j == dj
        p_over[sel], p_under[sel] = tail_lookup(population, deg_i, dj, n_ij[sel])
    return p_over, p_under


def _pair_blocks(m, nodes):
    """Yield ``(r, partners, n_ij)`` for every row r of ``nodes`` against the rows after it.

    Co-occurrences are computed a block of rows at a time, so the working
    set stays at O(len(nodes)) entries per row.
    """
    sub = m[nodes]
    subT = sub.T.tocsc()
    n = len(nodes)
    step = max(1, _BLOCK_ENTRIES // max(n, 1))
    for r0 in range(0, n - 1, step):
        r1 = min(n - 1, r0 + step)
        block = (sub[r0:r1] @ subT).toarray()
        for r in range(r0, r1):
            yield r, np.arange(r + 1, n), block[r - r0, r + 1:].astype(np.int64)


def _finish(records, n_tests, alpha, method, labels, side, tails, family, population, excluded):
    edges = ()
    if records and n_tests:
        result = correct(TestBattery(records, n_tests, alpha), method)
        order = {lab: k for k, lab in enumerate(labels)}
        rows = [records[k] for k in result.rejected]
        rows.sort(key=lambda rec: (order[rec.subject[0]], order[rec.subject[1]], rec.tail))
        edges = tuple((rec.subject[0], rec.subject[1], int(rec.statistic), rec.tail, rec.p) for rec in rows)
    return ValidatedNetwork(
        labels=labels, edges=edges, method=method, alpha=alpha, n_tests=int(n_tests), side=side,
        tails=tails, family=family, population=int(population), excluded=tuple(excluded),
    )


def validate_one_tail(bn: BipartiteNetwork, side: str = "A", alpha: float = 0.05, method: str = "fdr") -> ValidatedNetwork:
    """Over-expression test on every link of the projected network.

    N_t is the number of projected links.  Only p-values that could pass a
    threshold no larger than ``alpha`` are kept as records; the rest still
    count toward N_t.
    """
    side = normalize_side(side)
    _check(alpha, method)
    m = bn.biadjacency(side)
    deg = np.asarray(m.sum(axis=1)).ravel().astype(np.int64)
    population = m.shape[1]
    labels = bn.labels(side)
    nodes = np.flatnonzero(deg > 0)
    records = []
    n_tests = 0
    for r, partners, n_ij in _pair_blocks(m, nodes):
        linked = n_ij > 0
        if not linked.any():
            continue
        partners, n_ij = partners[linked], n_ij[linked]
        n_tests += n_ij.size
        i = nodes[r]
        p_over, _ = pair_pvalues(population, deg[i], deg[nodes[partners]], n_ij)
        for k in np.flatnonzero(p_over <= alpha):
            j = nodes[partners[k]]
            records.append(PValueRecord((labels[i], labels[j]), "over", float(p_over[k]), float(n_ij[k])))
    return _finish(records, n_tests, alpha, method, labels, side, "one", "tests", population, ())


def validate_two_tail(
    bn: BipartiteNetwork,
    side: str = "A",
    alpha: float = 0.05,
    method: str = "fdr",
    family: str = "tests",
) -> ValidatedNetwork:
    """Over- and under-expression tests on every pair of nodes, linked or not.

    Nodes of degree zero are left out of the family.  ``family="tests"``
    counts one test per tail per pair, N_t = N(N-1).  ``family="pairs"``
    uses one two-sided test per pair, p = min(1, 2 min(p_over, p_under)),
    with N_t = N(N-1)/2 and the tail taken from the smaller one-sided p.
    """
    side = normalize_side(side)
    _check(alpha, method, family)
    m = bn.biadjacency(side)
    deg = np.asarray(m.sum(axis=1)).ravel().astype(np.int64)
    population = m.shape[1]
    labels = bn.labels(side)
    nodes = np.flatnonzero(deg > 0)
    excluded = [labels[k] for k in np.flatnonzero(deg == 0)]
    n = nodes.size
    if n < 2:
        raise ValueError(f"side {side} has fewer than 2 nodes with links; nothing to test")
    n_pairs = n * (n - 1) // 2
    n_tests = 2 * n_pairs if family == "tests" else n_pairs

    records = []
    for r, partners, n_ij in _pair_blocks(m, nodes):
        i = nodes[r]
        js = nodes[partners]
        p_over, p_under = pair_pvalues(population, deg[i], deg[js], n_ij)
        if family == "tests":
            for tail, pv in (("over", p_over), ("under", p_under)):
                for k in np.flatnonzero(pv <= alpha):
                    records.append(PValueRecord((labels[i], labels[js[k]]), tail, float(pv[k]), float(n_ij[k])))
        else:
            p2 = np.minimum(1.0, 2.0 * np.minimum(p_over, p_under))
            for k in np.flatnonzero(p2 <= alpha):
                tail = "over" if p_over[k] <= p_under[k] else "under"
                records.append(PValueRecord((labels[i], labels[js[k]]), tail, float(p2[k]), float(n_ij[k])))
    return _finish(records, n_tests, alpha, method, labels, side, "two", family, population, excluded)


def write_validated(vn: ValidatedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j, n_ij, tail, p in vn.edges:
            fh.write(f"{i}\t{j}\t{n_ij}\t{tail}\t{p!r}\n")
