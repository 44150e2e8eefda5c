"""Exact p-value kernels.

Hypergeometric co-occurrence tails, the disparity-filter tail and the
binomial helpers used to motivate multiple-test correction.  All
combinatorics is carried out in natural-log space.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "HypergeomParams",
    "PValueRecord",
    "log_factorial",
    "log_choose",
    "hypergeom_pmf",
    "hypergeom_support",
    "pvalue_over",
    "pvalue_under",
    "hypergeom_tails",
    "tail_lookup",
    "pvalue_disparity",
    "binom_tail_at_least",
    "fwer_at_least_one",
]

TAILS = ("over", "under", "disparity")


@dataclass(frozen=True)
class HypergeomParams:
    """Overlap of two random subsets of sizes ``successes`` and ``draws`` in ``population``."""

    population: int
    successes: int
    draws: int

    def __post_init__(self):
        for name in ("population", "successes", "draws"):
            val = getattr(self, name)
            if int(val) != val:
                raise ValueError(f"{name} must be an integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if self.population < 0:
            raise ValueError("population must be non-negative")
        if not 0 <= self.successes <= self.population:
            raise ValueError(f"successes={self.successes} outside [0, {self.population}]")
        if not 0 <= self.draws <= self.population:
            raise ValueError(f"draws={self.draws} outside [0, {self.population}]")

    @property
    def support(self) -> tuple[int, int]:
        return hypergeom_support(self.population, self.successes, self.draws)


@dataclass(frozen=True)
class PValueRecord:
    """One hypothesis test: what was tested, which tail, its p-value and statistic."""

    subject: tuple
    tail: str
    p: float
    statistic: float

    def __post_init__(self):
        if self.tail not in TAILS:
            raise ValueError(f"tail must be one of {TAILS}, got {self.tail!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p-value {self.p} outside [0, 1]")


# ---------------------------------------------------------------------------
# log-factorial table
# ---------------------------------------------------------------------------


class _LogFactorialTable:
    # Grow-only.  Readers take a local reference to the current array; growth
    # builds a larger array and publishes it with a single assignment.
    MAX_CACHED = 1 << 21

    def __init__(self, size: int = 1024):
        self._lock = threading.Lock()
        self._table = gammaln(np.arange(size, dtype=float) + 1.0)

    def __len__(self):
        return self._table.size

    def _grow(self, n: int) -> np.ndarray:
        with self._lock:
            table = self._table
            if n < table.size:
                return table
            size = min(max(n + 1, 2 * table.size), self.MAX_CACHED)
            table = gammaln(np.arange(size, dtype=float) + 1.0)
            self._table = table
            return table

    def __call__(self, n):
        """ln(n!) for a non-negative integer or integer array."""
        n_arr = np.asarray(n)
        top = int(n_arr.max()) if n_arr.size else 0
        if top >= self.MAX_CACHED:
            return gammaln(n_arr.astype(float) + 1.0)
        table = self._table
        if top >= table.size:
            table = self._grow(top)
        out = table[n_arr]
        return float(out) if out.ndim == 0 else out


log_factorial = _LogFactorialTable()

_DIRECT_CHOOSE = 32


def log_choose(n: int, k: int) -> float:
    """Natural log of the binomial coefficient; ``-inf`` when ``k`` is outside [0, n]."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return -math.inf
    k = min(k, n - k)
    if k <= _DIRECT_CHOOSE:
        # differences of huge log-factorials cancel badly when k is small
        return math.fsum(math.log((n - k + i) / i) for i in range(1, k + 1))
    return float(log_factorial(n) - log_factorial(k) - log_factorial(n - k))


# ---------------------------------------------------------------------------
# hypergeometric
# ---------------------------------------------------------------------------


def hypergeom_support(population: int, successes: int, draws: int) -> tuple[int, int]:
    return max(0, successes + draws - population), min(successes, draws)


def _as_params(params) -> HypergeomParams:
    if isinstance(params, HypergeomParams):
        return params
    return HypergeomParams(*params)


def hypergeom_pmf(params, x: int) -> float:
    """P(X = x) for the overlap X of two random subsets.

    ``params`` is a :class:`HypergeomParams` or a ``(N_B, N_i, N_j)`` tuple.
    """
    p = _as_params(params)
    lo, hi = p.support
    if x < lo or x > hi:
        return 0.0
    logp = (
        log_choose(p.successes, x)
        + log_choose(p.population - p.successes, p.draws - x)
        - log_choose(p.population, p.draws)
    )
    return min(1.0, math.exp(logp))


# Below exp(-_LOG_FLOOR) relative to the mode, pmf terms vanish in double precision.
_LOG_FLOOR = 750.0


def _log_ratios(population, successes, draws, x):
    """ln P(x+1) - ln P(x) for each x in the array ``x``."""
    return (
        np.log(successes - x) + np.log(draws - x)
        - np.log(x + 1.0) - np.log(population - successes - draws + x + 1.0)
    )


@lru_cache(maxsize=8192)
def _tails(population: int, successes: int, draws: int):
    """Window start plus upper and lower cumulative tails over a window of the support.

    The pmf is built by the ratio recurrence
    P(x+1)/P(x) = (N_i - x)(N_j - x) / ((x + 1)(N_B - N_i - N_j + x + 1)),
    accumulated in log space around the mode and normalised to unit mass.
    The window grows until both of its edges either reach the support
    bounds or fall below the floating-point floor, so everything outside
    it is exactly zero at double precision.  Both tails are summed directly
    from their own extreme end, never as ``1 - sum``.
    """
    lo, hi = hypergeom_support(population, successes, draws)
    mode = min(hi, max(lo, (successes + 1) * (draws + 1) // (population + 2)))
    if population > 1:
        var = successes * draws * (population - successes) * (population - draws) / (population**2 * (population - 1))
    else:
        var = 0.0
    half = int(40.0 * math.sqrt(var)) + 64
    while True:
        a, b = max(lo, mode - half), min(hi, mode + half)
        x = np.arange(a, b, dtype=float)
        logpmf = np.concatenate(([0.0], np.cumsum(_log_ratios(population, successes, draws, x))))
        top = logpmf.max()
        left_ok = a == lo or logpmf[0] < top - _LOG_FLOOR
        right_ok = b == hi or logpmf[-1] < top - _LOG_FLOOR
        if left_ok and right_ok:
            break
        half *= 2
    pmf = np.exp(logpmf - top)
    pmf /= pmf.sum()  # pairwise summation
    upper = np.cumsum(pmf[::-1])[::-1]
    lower = np.cumsum(pmf)
    np.clip(upper, 0.0, 1.0, out=upper)
    np.clip(lower, 0.0, 1.0, out=lower)
    # the window holds all representable mass, so its ends are the full tails
    upper[0] = lower[-1] = 1.0
    upper.setflags(write=False)
    lower.setflags(write=False)
    return a, upper, lower


def tail_lookup(population: int, successes: int, draws: int, n):
    """``(P(X >= n), P(X <= n))`` for an integer or integer array ``n`` inside the support."""
    start, upper, lower = _tails(int(population), int(successes), int(draws))
    n_arr = np.asarray(n, dtype=np.int64)
    k = n_arr - start
    inside = (k >= 0) & (k < upper.size)
    kc = np.clip(k, 0, upper.size - 1)
    p_over = np.where(inside, upper[kc], np.where(k < 0, 1.0, 0.0))
    p_under = np.where(inside, lower[kc], np.where(k < 0, 0.0, 1.0))
    if p_over.ndim == 0:
        return float(p_over), float(p_under)
    return p_over, p_under


def hypergeom_tails(population: int, successes: int, draws: int):
    """``(lo, upper, lower)`` with ``upper[k] = P(X >= lo+k)`` and ``lower[k] = P(X <= lo+k)``.

    Spans the whole support; the arrays are read-only.
    """
    HypergeomParams(population, successes, draws)
    lo, hi = hypergeom_support(population, successes, draws)
    upper, lower = tail_lookup(population, successes, draws, np.arange(lo, hi + 1))
    upper.setflags(write=False)
    lower.setflags(write=False)
    return lo, upper, lower


def _check_observed(p: HypergeomParams, n_ij: int) -> tuple[int, int]:
    lo, hi = p.support
    if int(n_ij) != n_ij or not lo <= n_ij <= hi:
        raise ValueError(f"co-occurrence {n_ij} outside support [{lo}, {hi}]")
    return lo, hi


def pvalue_over(params, n_ij: int) -> float:
    """P(X >= n_ij): over-expression of the observed co-occurrence."""
    p = _as_params(params)
    _check_observed(p, n_ij)
    return tail_lookup(p.population, p.successes, p.draws, int(n_ij))[0]


def pvalue_under(params, n_ij: int) -> float:
    """P(X <= n_ij): under-expression of the observed co-occurrence."""
    p = _as_params(params)
    _check_observed(p, n_ij)
    return tail_lookup(p.population, p.successes, p.draws, int(n_ij))[1]


# ---------------------------------------------------------------------------
# disparity filter and binomial helpers
# ---------------------------------------------------------------------------


def pvalue_disparity(k, x):
    """Probability that one of ``k`` uniform-random shares of a unit strength is at least ``x``.

    Closed form ``(1 - x)**(k - 1)``.  Accepts scalars or numpy arrays;
    every ``k`` must be at least 2 and every ``x`` in [0, 1].
    """
    k_arr = np.asarray(k)
    x_arr = np.asarray(x, dtype=float)
    if np.any(k_arr < 2):
        raise ValueError("disparity p-value needs degree k >= 2")
    if np.any((x_arr < 0) | (x_arr > 1)) or np.any(np.isnan(x_arr)):
        raise ValueError("normalized weight must lie in [0, 1]")
    out = np.power(1.0 - x_arr, k_arr - 1.0)
    return float(out) if out.ndim == 0 else out


def binom_tail_at_least(n: int, k: int, p: float) -> float:
    """P(S >= k) for S ~ Binomial(n, p)."""
    if not 0 <= k <= n:
        raise ValueError(f"threshold k={k} outside [0, {n}]")
    if not 0.0 <= p <= 1.0:
        raise ValueError("success probability must lie in [0, 1]")
    if k == 0 or p == 1.0:
        return 1.0
    if p == 0.0:
        return 0.0
    if n <= 1000:
        q = 1.0 - p
        return min(1.0, math.fsum(math.comb(n, s) * p**s * q ** (n - s) for s in range(k, n + 1)))
    lp, lq = math.log(p), math.log1p(-p)
    terms = [math.exp(log_choose(n, s) + s * lp + (n - s) * lq) for s in range(k, n + 1)]
    return min(1.0, math.fsum(terms))


def fwer_at_least_one(p_single: float, n_tests: int) -> float:
    """Probability of at least one rejection among ``n_tests`` independent tests at level ``p_single``."""
    if not 0.0 <= p_single <= 1.0:
        raise ValueError("p_single must lie in [0, 1]")
    if n_tests < 1:
        raise ValueError("n_tests must be >= 1")
    if p_single == 1.0:
        return 1.0
    return -math.expm1(n_tests * math.log1p(-p_single))
