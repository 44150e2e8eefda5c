import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svnkit.corrections import TestBattery, bonferroni, correct, fdr, uncorrected
from svnkit.pvalues import PValueRecord

from oracles import fdr_rank_scan

WORKED = [0.001, 0.008, 0.039, 0.041, 0.042, 0.060]

pvals = st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=60)


def test_bonferroni_threshold():
    battery = TestBattery.from_pvalues([0.5], n_tests=1000)
    assert battery.bonferroni_threshold == pytest.approx(5e-5, rel=1e-15)


def test_bonferroni_two_tests():
    # 0.01 sits below alpha / 2 = 0.025, so both tests are rejected
    res = bonferroni(TestBattery.from_pvalues([1e-6, 0.01]))
    assert res.threshold == 0.025
    assert res.rejected == {0, 1}
    assert bonferroni(TestBattery.from_pvalues([1e-6, 0.03])).rejected == {0}


def test_fdr_worked_example():
    battery = TestBattery.from_pvalues(WORKED)
    theta = battery.bonferroni_threshold
    assert theta == pytest.approx(0.05 / 6)
    # rank by rank: only ranks 1 and 2 sit below t * theta
    passing = [t for t, p in enumerate(sorted(WORKED), start=1) if p < t * theta]
    assert passing == [1, 2]
    res = fdr(battery)
    assert res.rejected == {0, 1}
    assert res.threshold == 0.008
    assert res.rejected == fdr_rank_scan(WORKED, 0.05, 6)


def test_fdr_all_ones():
    res = fdr(TestBattery.from_pvalues([1.0] * 10))
    assert res.rejected == frozenset() and res.threshold == 0.0


def test_fdr_single_record():
    assert fdr(TestBattery.from_pvalues([0.04])).rejected == {0}
    assert fdr(TestBattery.from_pvalues([0.06])).rejected == frozenset()


def test_fdr_ties_rejected_together():
    res = fdr(TestBattery.from_pvalues([0.01, 0.01, 0.01, 0.9]))
    assert res.rejected == {0, 1, 2}


def test_fdr_larger_family_is_stricter():
    p = [0.001, 0.008, 0.02]
    assert fdr(TestBattery.from_pvalues(p)).rejected == {0, 1, 2}
    assert fdr(TestBattery.from_pvalues(p, n_tests=30)).rejected == {0}
    assert fdr_rank_scan(p, 0.05, 30) == {0}


def test_non_strict_boundary():
    battery = TestBattery.from_pvalues([0.025, 0.9])
    assert bonferroni(battery).rejected == frozenset()
    assert bonferroni(battery, strict=False).rejected == {0}
    assert fdr(battery, strict=False).rejected == {0}


def test_uncorrected_and_dispatch():
    battery = TestBattery.from_pvalues([0.01, 0.049, 0.05])
    assert uncorrected(battery).rejected == {0, 1}
    assert correct(battery, "none") == uncorrected(battery)
    with pytest.raises(ValueError):
        correct(battery, "holm")


def test_battery_validation():
    rec = PValueRecord((0,), "over", 0.1, 1.0)
    with pytest.raises(ValueError):
        TestBattery([rec, rec], n_tests=1)
    with pytest.raises(ValueError):
        TestBattery([rec], n_tests=1, alpha=1.0)
    with pytest.raises(ValueError):
        TestBattery([], n_tests=0)


def test_mask():
    res = fdr(TestBattery.from_pvalues(WORKED))
    np.testing.assert_array_equal(res.mask(6), [True, True, False, False, False, False])


@settings(max_examples=300, deadline=None)
@given(pvals, st.integers(0, 100), st.sampled_from([0.01, 0.05, 0.2]))
def test_fdr_matches_rank_scan(p, extra, alpha):
    battery = TestBattery.from_pvalues(p, alpha=alpha, n_tests=len(p) + extra)
    for strict in (True, False):
        res = fdr(battery, strict=strict)
        assert set(res.rejected) == fdr_rank_scan(p, alpha, len(p) + extra, strict)
        assert all(p[k] <= res.threshold for k in res.rejected)


@settings(max_examples=300, deadline=None)
@given(pvals, st.integers(0, 100))
def test_bonferroni_subset_of_fdr(p, extra):
    battery = TestBattery.from_pvalues(p, n_tests=len(p) + extra)
    assert bonferroni(battery).rejected <= fdr(battery).rejected
    assert fdr(battery).rejected <= uncorrected(battery).rejected


@settings(max_examples=200, deadline=None)
@given(pvals, st.randoms(use_true_random=False))
def test_fdr_order_invariant(p, rnd):
    perm = list(range(len(p)))
    rnd.shuffle(perm)
    shuffled = [p[k] for k in perm]
    a = fdr(TestBattery.from_pvalues(p))
    b = fdr(TestBattery.from_pvalues(shuffled))
    assert {perm[k] for k in b.rejected} == set(a.rejected)
    assert a.threshold == b.threshold


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 0.999), min_size=1, max_size=40))
def test_everything_below_bonferroni_rejects_all(u):
    n = len(u)
    p = [x * 0.05 / n for x in u]
    battery = TestBattery.from_pvalues(p)
    assert len(bonferroni(battery).rejected) == n
    assert len(fdr(battery).rejected) == n
