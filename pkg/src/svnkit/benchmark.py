"""Planted-block bipartite benchmarks, degree-preserving rewiring and the noise-robustness experiment."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .community import MetricUndefinedError, Partition, adjusted_rand, adjusted_wallace, community_cores, louvain
from .graph import BipartiteNetwork, normalize_side, project

__all__ = [
    "BenchmarkSpec",
    "RewirePlan",
    "generate",
    "rewire",
    "robustness_experiment",
    "ExperimentResult",
    "NETWORK_KINDS",
]

NETWORK_KINDS = ("full", "fdr", "bonferroni")
METRICS = ("r_adj", "w_adj")


@dataclass(frozen=True)
class BenchmarkSpec:
    """Block model: A-node i of block b links to each B-node of block b with
    probability ``intra_link_prob`` and to every other B-node with
    ``inter_link_prob``."""

    n_blocks: int = 4
    a_nodes_per_block: int = 50
    b_nodes_per_block: int = 100
    intra_link_prob: float = 0.3
    inter_link_prob: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.n_blocks < 1 or self.a_nodes_per_block < 1 or self.b_nodes_per_block < 1:
            raise ValueError("every block needs at least one A node and one B node")
        for name in ("intra_link_prob", "inter_link_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class RewirePlan:
    p_r: float
    seed: int = 0
    swap: str = "degree"

    def __post_init__(self):
        if not 0.0 <= self.p_r <= 1.0:
            raise ValueError("p_r must lie in [0, 1]")
        if self.swap not in ("degree", "any"):
            raise ValueError("swap must be 'degree' or 'any'")


def generate(spec: BenchmarkSpec) -> tuple[BipartiteNetwork, Partition]:
    """Sample a benchmark; returns the network and the planted partition of set A."""
    rng = np.random.default_rng(spec.seed)
    n_a = spec.n_blocks * spec.a_nodes_per_block
    n_b = spec.n_blocks * spec.b_nodes_per_block
    block_a = np.repeat(np.arange(spec.n_blocks), spec.a_nodes_per_block)
    block_b = np.repeat(np.arange(spec.n_blocks), spec.b_nodes_per_block)
    prob = np.where(block_a[:, None] == block_b[None, :], spec.intra_link_prob, spec.inter_link_prob)
    a_idx, b_idx = np.nonzero(rng.random((n_a, n_b)) < prob)
    # fixed-width labels sort in index order
    a_labels = tuple(f"a{k}" for k in range(n_a))
    b_labels = tuple(f"b{k}" for k in range(n_b))
    bn = BipartiteNetwork._from_indices(a_labels, b_labels, a_idx, b_idx)
    return bn, Partition(a_labels, block_a)


def rewire(bn: BipartiteNetwork, plan: RewirePlan) -> BipartiteNetwork:
    """Degree-preserving double-edge swaps on a fraction ``p_r`` of the links.

    ``round(p_r * L / 2)`` successful swaps are performed, each touching two
    links: (a1, b1), (a2, b2) -> (a1, b2), (a2, b1).  In ``degree`` mode the
    two exchanged endpoints must have equal degree, matching on the B side
    for even swaps and on the A side for odd ones.  Swaps that would create
    a repeated link are resampled within a bounded retry budget.
    """
    n_links = bn.n_links
    target = int(round(plan.p_r * n_links / 2.0))
    if target == 0 or n_links < 2:
        return bn
    rng = np.random.default_rng(plan.seed)
    a = bn.a_idx.copy()
    b = bn.b_idx.copy()
    present = set(zip(a.tolist(), b.tolist()))

    # Link positions keep the degrees of both endpoints through every swap
    # (only the matched endpoint is exchanged), so classes are computed once.
    classes = {}
    if plan.swap == "degree":
        for side, ends in (("B", b), ("A", a)):
            deg = np.bincount(ends)
            d = deg[ends]
            order = np.argsort(d, kind="stable")
            bounds = np.flatnonzero(np.diff(d[order])) + 1
            groups = np.split(order, bounds)
            classes[side] = (d, {int(d[g[0]]): g for g in groups if g.size})

    done = attempts = 0
    budget = 100 * target + 1000
    while done < target and attempts < budget:
        attempts += 1
        e1 = int(rng.integers(n_links))
        if plan.swap == "degree":
            d, groups = classes["B" if done % 2 == 0 else "A"]
            pool = groups[int(d[e1])]
            e2 = int(pool[rng.integers(pool.size)])
        else:
            e2 = int(rng.integers(n_links))
        a1, b1, a2, b2 = a[e1], b[e1], a[e2], b[e2]
        if a1 == a2 or b1 == b2:
            continue
        if (a1, b2) in present or (a2, b1) in present:
            continue
        present -= {(a1, b1), (a2, b2)}
        present |= {(a1, b2), (a2, b1)}
        # exchange the matched endpoint so every position stays in its class
        if plan.swap == "degree" and done % 2 == 1:
            a[e1], a[e2] = a2, a1
        else:
            b[e1], b[e2] = b2, b1
        done += 1
    if done < target:
        warnings.warn(f"rewiring stopped after {done} of {target} swaps (retry budget exhausted)", stacklevel=2)
    return BipartiteNetwork._from_indices(bn.a_labels, bn.b_labels, a, b)


# ---------------------------------------------------------------------------
# robustness experiment
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    """Per-realization scores and their summary.

    ``scores[(kind, p_r, metric)]`` lists one value per realization, NaN
    where the metric was undefined (for example an empty validated network).
    """

    p_r_values: tuple
    realizations: int
    scores: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def rows(self):
        """``(network_kind, p_r, metric, mean, std)`` over defined values."""
        out = []
        for kind in NETWORK_KINDS:
            for p_r in self.p_r_values:
                for metric in METRICS:
                    vals = np.asarray(self.scores[(kind, p_r, metric)], dtype=float)
                    ok = vals[~np.isnan(vals)]
                    mean = float(ok.mean()) if ok.size else math.nan
                    std = float(ok.std()) if ok.size else math.nan
                    out.append((kind, p_r, metric, mean, std))
        return out

    def mean(self, kind, p_r, metric) -> float:
        for row in self.rows():
            if row[:3] == (kind, p_r, metric):
                return row[3]
        raise KeyError((kind, p_r, metric))

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("network_kind\tp_r\tmetric\tmean\tstd\n")
            for kind, p_r, metric, mean, std in self.rows():
                fh.write(f"{kind}\t{p_r!r}\t{metric}\t{mean!r}\t{std!r}\n")


def _score(part: Partition, reference: Partition):
    try:
        r = adjusted_rand(part, reference)
    except MetricUndefinedError:
        r = math.nan
    try:
        w = adjusted_wallace(part, reference)
    except MetricUndefinedError:
        w = math.nan
    return r, w


def _realization(job):
    bn, g0, p_r, side, alpha, swap, weights, rewire_seed, louvain_seed = job
    noisy = rewire(bn, RewirePlan(p_r, rewire_seed, swap))
    out = {}
    out["full"] = _score(louvain(project(noisy, side), seed=louvain_seed), g0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for method in ("fdr", "bonferroni"):
            cores = community_cores(noisy, side, alpha, method, seed=louvain_seed, weights=weights)
            out[method] = _score(cores, g0) if len(cores) else (math.nan, math.nan)
    return out


def realization_seed(seed: int, p_index: int, realization: int) -> int:
    """Rewiring seed of one realization, derived from the master seed by counters."""
    ss = np.random.SeedSequence([int(seed), int(p_index), int(realization)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def robustness_experiment(
    bn: BipartiteNetwork,
    p_r_values,
    realizations: int = 100,
    alpha: float = 0.05,
    seed: int = 0,
    side: str = "A",
    swap: str = "degree",
    weights: str = "binary",
    workers: int = 1,
) -> ExperimentResult:
    """Score noisy partitions against the noiseless reference G_0.

    G_0 is the Louvain partition of the noiseless full projection.  For each
    noise level and realization the network is rewired, then the full
    projection, the FDR validated network and the Bonferroni validated
    network are partitioned and compared with G_0 (adjusted Rand, and
    adjusted Wallace with G_0 as reference).  Louvain always runs with the
    master seed, so only the rewiring differs between realizations.  Results
    do not depend on ``workers``.
    """
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    side = normalize_side(side)
    p_r_values = tuple(float(p) for p in p_r_values)
    louvain_seed = int(seed)
    g0 = louvain(project(bn, side), seed=louvain_seed)
    jobs = [
        (bn, g0, p_r, side, alpha, swap, weights, realization_seed(seed, k, r), louvain_seed)
        for k, p_r in enumerate(p_r_values)
        for r in range(realizations)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_realization, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        outcomes = [_realization(job) for job in jobs]

    scores = {(kind, p_r, m): [] for kind in NETWORK_KINDS for p_r in p_r_values for m in METRICS}
    for job, out in zip(jobs, outcomes):
        p_r = job[2]
        for kind in NETWORK_KINDS:
            r, w = out[kind]
            scores[(kind, p_r, "r_adj")].append(r)
            scores[(kind, p_r, "w_adj")].append(w)
    params = {
        "p_r_values": list(p_r_values),
        "realizations": realizations,
        "alpha": alpha,
        "seed": seed,
        "side": side,
        "swap": swap,
        "weights": weights,
        "swaps_per_realization": "round(p_r * n_links / 2)",
        "louvain_seed": louvain_seed,
        "g0_communities": g0.n_communities,
    }
    return ExperimentResult(p_r_values, realizations, scores, params)


def spec_dict(spec: BenchmarkSpec) -> dict:
    return asdict(spec)
