"""Disparity-filter backbone of a weighted network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corrections import METHODS, TestBattery, correct
from .graph import WeightedNetwork
from .pvalues import PValueRecord, pvalue_disparity

__all__ = ["Backbone", "disparity_pvalues", "disparity_backbone", "write_backbone"]

DEGREE_ONE_POLICIES = ("drop", "keep")


@dataclass(frozen=True)
class Backbone:
    """Retained arcs as ``(source, target, weight, p_value)``.

    Always directed: an arc i -> j means the link passed the test from i's
    side.  Arcs kept only because of ``degree_one_policy="keep"`` carry a
    NaN p-value since the test is undefined at degree one.
    """

    edges: tuple
    alpha: float
    correction: str
    n_tests: int
    threshold: float
    directed: bool = True

    def pairs(self) -> set[tuple[str, str]]:
        return {(u, v) for u, v, _, _ in self.edges}

    def symmetrize(self, mode: str = "union") -> list[tuple[str, str, float]]:
        """Collapse to undirected links.

        ``union`` keeps a link validated from either side, ``intersection``
        only links validated from both.
        """
        if mode not in ("union", "intersection"):
            raise ValueError(f"unknown symmetrize mode {mode!r}")
        arcs = {(u, v): w for u, v, w, _ in self.edges}
        out = {}
        for (u, v), w in arcs.items():
            if mode == "union" or (v, u) in arcs:
                out[(u, v) if u <= v else (v, u)] = w
        return [(u, v, w) for (u, v), w in sorted(out.items())]


def disparity_pvalues(wn: WeightedNetwork) -> np.ndarray:
    """Per-arc p-value seen from the source node; NaN where the source has degree 1."""
    k = wn.out_degree()[wn.source]
    x = np.clip(wn.normalized_weights(), 0.0, 1.0)
    p = np.full(wn.n_arcs, np.nan)
    testable = k >= 2
    if testable.any():
        p[testable] = pvalue_disparity(k[testable], x[testable])
    return p


def disparity_backbone(
    wn: WeightedNetwork,
    alpha: float = 0.05,
    correction: str = "fdr",
    degree_one_policy: str = "drop",
    strict: bool = True,
) -> Backbone:
    """Test every (node, incident link) pair and keep the significant arcs.

    Each undirected link yields two tests, one per endpoint.  With
    ``correction="none"`` an arc is kept when its p-value is below
    ``alpha``; otherwise the family of all tests (N_t = number of tested
    arcs) goes through the chosen correction.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if correction not in METHODS:
        raise ValueError(f"unknown correction {correction!r}")
    if degree_one_policy not in DEGREE_ONE_POLICIES:
        raise ValueError(f"degree_one_policy must be one of {DEGREE_ONE_POLICIES}")

    p = disparity_pvalues(wn)
    x = wn.normalized_weights()
    tested = np.flatnonzero(~np.isnan(p))
    keep = np.zeros(wn.n_arcs, dtype=bool)
    threshold = alpha
    if tested.size:
        records = [
            PValueRecord((int(wn.source[a]), int(wn.target[a])), "disparity", float(p[a]), float(x[a]))
            for a in tested
        ]
        result = correct(TestBattery(records, tested.size, alpha), correction, strict)
        keep[tested[sorted(result.rejected)]] = True
        threshold = result.threshold
    if degree_one_policy == "keep":
        keep |= np.isnan(p)

    edges = tuple(
        (wn.labels[wn.source[a]], wn.labels[wn.target[a]], float(wn.weight[a]), float(p[a]))
        for a in np.flatnonzero(keep)
    )
    return Backbone(edges, alpha, correction, int(tested.size), float(threshold))


def write_backbone(bb: Backbone, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w, p in bb.edges:
            fh.write(f"{u}\t{v}\t{w!r}\t{p!r}\n")
