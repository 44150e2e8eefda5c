"""Multiple-hypothesis-test corrections (Bonferroni and false discovery rate)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pvalues import PValueRecord

__all__ = ["TestBattery", "CorrectionResult", "bonferroni", "fdr", "uncorrected", "correct", "METHODS"]

METHODS = ("none", "bonferroni", "fdr")


@dataclass(frozen=True)
class TestBattery:
    """A family of tests.

    ``n_tests`` is the family size N_t.  It may exceed ``len(records)``:
    tests that were run but whose p-value is known to be too large to ever
    be rejected need not be stored, yet they still count toward N_t.
    """

    __test__ = False  # not a pytest class

    records: tuple
    n_tests: int
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_tests < 1:
            raise ValueError("n_tests must be a positive integer")
        if self.n_tests < len(self.records):
            raise ValueError(f"n_tests={self.n_tests} is smaller than the {len(self.records)} records")

    @classmethod
    def from_pvalues(cls, pvalues, alpha: float = 0.05, n_tests: int | None = None, tail: str = "over"):
        """Convenience constructor; subjects are the positional indices."""
        recs = [PValueRecord((k,), tail, float(p), float("nan")) for k, p in enumerate(pvalues)]
        return cls(recs, len(recs) if n_tests is None else n_tests, alpha)

    @property
    def pvalues(self) -> np.ndarray:
        return np.fromiter((r.p for r in self.records), dtype=float, count=len(self.records))

    @property
    def bonferroni_threshold(self) -> float:
        return self.alpha / self.n_tests


@dataclass(frozen=True)
class CorrectionResult:
    method: str
    threshold: float
    rejected: frozenset = field(default_factory=frozenset)

    def mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        out[list(self.rejected)] = True
        return out


def _passes(p, bound, strict: bool):
    return p < bound if strict else p <= bound


def uncorrected(battery: TestBattery, strict: bool = True) -> CorrectionResult:
    p = battery.pvalues
    hit = np.flatnonzero(_passes(p, battery.alpha, strict))
    return CorrectionResult("none", battery.alpha, frozenset(hit.tolist()))


def bonferroni(battery: TestBattery, strict: bool = True) -> CorrectionResult:
    """Reject every test with p below alpha / N_t."""
    thr = battery.bonferroni_threshold
    hit = np.flatnonzero(_passes(battery.pvalues, thr, strict))
    return CorrectionResult("bonferroni", thr, frozenset(hit.tolist()))


def fdr(battery: TestBattery, strict: bool = True) -> CorrectionResult:
    """Rank-based false discovery rate control.

    With theta = alpha / N_t and p-values sorted ascending (stable, ties by
    record index), find the largest rank t with p_(t) < t * theta and reject
    ranks 1..t.  The reported threshold is p_(t); when no rank qualifies
    nothing is rejected and the threshold is 0.
    """
    p = battery.pvalues
    if p.size == 0:
        return CorrectionResult("fdr", 0.0, frozenset())
    order = np.argsort(p, kind="stable")
    ranks = np.arange(1, p.size + 1)
    ok = np.flatnonzero(_passes(p[order], ranks * battery.bonferroni_threshold, strict))
    if ok.size == 0:
        return CorrectionResult("fdr", 0.0, frozenset())
    t_max = int(ok[-1]) + 1
    return CorrectionResult("fdr", float(p[order[t_max - 1]]), frozenset(order[:t_max].tolist()))


def correct(battery: TestBattery, method: str, strict: bool = True) -> CorrectionResult:
    if method == "fdr":
        return fdr(battery, strict)
    if method == "bonferroni":
        return bonferroni(battery, strict)
    if method == "none":
        return uncorrected(battery, strict)
    raise ValueError(f"unknown correction {method!r}; expected one of {METHODS}")
