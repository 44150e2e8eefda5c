import math
import warnings

import numpy as np
import pytest

from svnkit.benchmark import (
    BenchmarkSpec,
    ExperimentResult,
    RewirePlan,
    generate,
    realization_seed,
    rewire,
    robustness_experiment,
)
from svnkit.community import adjusted_rand, louvain
from svnkit.graph import project
from svnkit.svn import validate_one_tail

SMALL = BenchmarkSpec(n_blocks=2, a_nodes_per_block=20, b_nodes_per_block=40, intra_link_prob=0.3, inter_link_prob=0.0)


def test_perfect_blocks_project_to_cliques():
    bn, planted = generate(BenchmarkSpec(n_blocks=2, a_nodes_per_block=5, b_nodes_per_block=10, intra_link_prob=1.0, inter_link_prob=0.0))
    pn = project(bn)
    assert pn.n_edges == 2 * 10
    assert set(pn.cooccurrence.tolist()) == {10}
    where = planted.assignment
    assert all(where[u] == where[v] for u, v, _ in pn.edges())


def test_generate_deterministic():
    a, pa = generate(BenchmarkSpec(seed=42))
    b, pb = generate(BenchmarkSpec(seed=42))
    assert a.same_as(b) and pa == pb
    np.testing.assert_array_equal(a.a_idx, b.a_idx)
    assert not a.same_as(generate(BenchmarkSpec(seed=43))[0])


def test_generate_shape():
    bn, planted = generate(BenchmarkSpec())
    assert (bn.n_a, bn.n_b) == (200, 400)
    assert planted.n_communities == 4
    assert bn.n_links == pytest.approx(200 * (100 * 0.3 + 300 * 0.02), rel=0.05)


@pytest.mark.parametrize("kwargs", [{"n_blocks": 0}, {"intra_link_prob": 1.5}, {"inter_link_prob": -0.1}])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        BenchmarkSpec(**kwargs)


def test_rewire_zero_is_identity():
    bn, _ = generate(SMALL)
    assert rewire(bn, RewirePlan(0.0, seed=9)) is bn


@pytest.mark.parametrize("swap", ["degree", "any"])
@pytest.mark.parametrize("p_r", [0.05, 0.3, 1.0])
def test_rewire_preserves_degrees(swap, p_r):
    bn, _ = generate(BenchmarkSpec(seed=3))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = rewire(bn, RewirePlan(p_r, seed=1, swap=swap))
    np.testing.assert_array_equal(out.degrees("A"), bn.degrees("A"))
    np.testing.assert_array_equal(out.degrees("B"), bn.degrees("B"))
    assert out.n_links == bn.n_links
    assert len(set(out.links())) == out.n_links


def test_rewire_changes_expected_share():
    bn, _ = generate(BenchmarkSpec(seed=3))
    out = rewire(bn, RewirePlan(0.2, seed=5))
    moved = len(set(bn.links()) - set(out.links()))
    # each swap replaces two links; a later swap may undo an earlier one
    assert 0 < moved <= round(0.2 * bn.n_links / 2) * 2


def test_rewire_deterministic():
    bn, _ = generate(BenchmarkSpec(seed=3))
    assert rewire(bn, RewirePlan(0.3, seed=2)).same_as(rewire(bn, RewirePlan(0.3, seed=2)))


def test_rewire_budget_warning():
    from svnkit.graph import BipartiteNetwork

    # complete bipartite graph admits no swap at all
    bn = BipartiteNetwork.from_links([(a, b) for a in "xyz" for b in "pq"])
    with pytest.warns(UserWarning, match="retry budget"):
        out = rewire(bn, RewirePlan(0.5, seed=0))
    assert out.same_as(bn)


def test_plan_validation():
    with pytest.raises(ValueError):
        RewirePlan(1.2)
    with pytest.raises(ValueError):
        RewirePlan(0.1, swap="random")


def test_null_rate_near_alpha():
    rates = []
    for seed in range(100):
        spec = BenchmarkSpec(n_blocks=1, a_nodes_per_block=40, b_nodes_per_block=80, intra_link_prob=0.1, inter_link_prob=0.1, seed=seed)
        vn = validate_one_tail(generate(spec)[0], alpha=0.05, method="fdr")
        rates.append(vn.n_edges / max(vn.n_tests, 1))
    # every validated link is false; FDR control keeps them to a small share of N_t
    assert np.mean(rates) <= 0.05


def test_recovery_degrades_with_noise():
    grid = (0.0, 0.1, 0.2, 0.3, 0.6)
    means = []
    for p_r in grid:
        scores = []
        for seed in range(100):
            bn, planted = generate(BenchmarkSpec(**{**SMALL.__dict__, "seed": seed}))
            noisy = rewire(bn, RewirePlan(p_r, seed=seed))
            scores.append(adjusted_rand(louvain(project(noisy), seed=0), planted))
        means.append(np.mean(scores))
    assert means[0] == 1.0
    assert all(b <= a + 1e-9 for a, b in zip(means, means[1:]))
    assert means[-1] < means[0]


def test_realization_seed_counters():
    seeds = {realization_seed(1, k, r) for k in range(3) for r in range(50)}
    assert len(seeds) == 150
    assert realization_seed(1, 0, 0) == realization_seed(1, 0, 0)


def test_experiment_noiseless_full_network():
    bn, _ = generate(BenchmarkSpec(n_blocks=3, a_nodes_per_block=15, b_nodes_per_block=30, seed=2))
    res = robustness_experiment(bn, [0.0], realizations=2, seed=7)
    assert res.scores[("full", 0.0, "r_adj")] == [1.0, 1.0]
    assert res.mean("full", 0.0, "w_adj") == 1.0
    assert len(res.rows()) == 3 * 1 * 2


def test_experiment_workers_do_not_change_results(tmp_path):
    bn, _ = generate(BenchmarkSpec(n_blocks=3, a_nodes_per_block=15, b_nodes_per_block=30, seed=2))
    one = robustness_experiment(bn, [0.1, 0.3], realizations=3, seed=4, workers=1)
    two = robustness_experiment(bn, [0.1, 0.3], realizations=3, seed=4, workers=2)
    one.write_tsv(tmp_path / "1.tsv")
    two.write_tsv(tmp_path / "2.tsv")
    assert (tmp_path / "1.tsv").read_bytes() == (tmp_path / "2.tsv").read_bytes()


def test_experiment_nan_aware_summary():
    res = ExperimentResult((0.1,), 3)
    for kind in ("full", "fdr", "bonferroni"):
        res.scores[(kind, 0.1, "r_adj")] = [0.5, math.nan, 1.0]
        res.scores[(kind, 0.1, "w_adj")] = [math.nan] * 3
    assert res.mean("fdr", 0.1, "r_adj") == 0.75
    assert math.isnan(res.mean("fdr", 0.1, "w_adj"))
    with pytest.raises(KeyError):
        res.mean("fdr", 0.2, "r_adj")


def test_experiment_rejects_zero_realizations():
    bn, _ = generate(SMALL)
    with pytest.raises(ValueError):
        robustness_experiment(bn, [0.1], realizations=0)
